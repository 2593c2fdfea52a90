#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "transit/error.hpp"
#include "transit/ptn/instance.hpp"

namespace transit::ptn {

namespace detail {

// Single-source shortest paths over the undirected PTN.
inline std::vector<double> shortest_from(const PtnInstance& inst, int source,
                                         const std::function<double(const Edge&)>& weight) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(inst.stops.size(), inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  const std::size_t s = inst.stop_pos(source);
  dist[s] = 0.0;
  q.push({0.0, s});
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(inst.stops.size());
  for (const auto& e : inst.edges) {
    const std::size_t a = inst.stop_pos(e.u), b = inst.stop_pos(e.v);
    adj[a].push_back({b, weight(e)});
    adj[b].push_back({a, weight(e)});
  }
  while (!q.empty()) {
    auto [d, i] = q.top();
    q.pop();
    if (d > dist[i]) continue;
    for (auto [j, w] : adj[i])
      if (d + w < dist[j]) {
        dist[j] = d + w;
        q.push({dist[j], j});
      }
  }
  return dist;
}

}  // namespace detail

// Fills missing line-to-line and depot deadheads from shortest paths in the
// PTN (time weighted by L_drive, distance by edge length). Line-to-line times
// include the minimum turnaround. Explicit values are kept.
inline PtnInstance derive_turnarounds(PtnInstance inst) {
  auto time_w = [](const Edge& e) { return static_cast<double>(e.L_drive); };
  auto dist_w = [](const Edge& e) { return e.length; };
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  auto lookup = [&](int from, int to) {
    auto it = cache.find(from);
    if (it == cache.end())
      it = cache.emplace(from, std::make_pair(detail::shortest_from(inst, from, time_w),
                                              detail::shortest_from(inst, from, dist_w)))
               .first;
    const std::size_t j = inst.stop_pos(to);
    const double t = it->second.first[j];
    if (t == std::numeric_limits<double>::infinity()) throw DisconnectedPtn(from, to);
    return Deadhead{static_cast<int>(std::lround(t)), it->second.second[j]};
  };
  const int depot = inst.depot();
  for (const auto& l1 : inst.pool) {
    for (const auto& l2 : inst.pool) {
      if (inst.turnaround.count({l1.id, l2.id})) continue;
      Deadhead d = lookup(l1.last_stop(), l2.first_stop());
      d.time += inst.params.min_turnaround;
      inst.turnaround[{l1.id, l2.id}] = d;
    }
    if (!inst.depot_out.count(l1.id)) inst.depot_out[l1.id] = lookup(depot, l1.first_stop());
    if (!inst.depot_in.count(l1.id)) inst.depot_in[l1.id] = lookup(l1.last_stop(), depot);
  }
  return inst;
}

}  // namespace transit::ptn
