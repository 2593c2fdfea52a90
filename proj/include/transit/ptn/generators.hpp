#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "transit/ptn/instance.hpp"

// Built-in instances. The `small` and `toy` topologies are fixed; their
// numeric data uses these defaults:
//
//   T = 10, periods {0, 1}, gamma = (1, 1, 1, 1, 100)
//   every edge: length 1 km, L_drive 2, U_drive 4, f_min 1, f_max 3
//   every stop: L_wait 1, U_wait 3, L_trans 2, U_trans 2 + T - 1
//   demand 10 for every stop pair u < v with a directed path u -> v
//   line cost 1 + length
//
// small: path v1 - v2 - v3 - v4. Pool: the three single-edge lines, v1-v2-v3,
//        v2-v3-v4 and v1-v2-v3-v4.
// toy:   8 stops, edges 1-3, 2-3, 3-4, 4-5, 5-6, 3-6, 6-7, 6-8 (directed low to
//        high). Pool: the 8 single-edge lines, then all 8 maximal paths from a
//        source stop (1, 2) to a sink stop (7, 8), depth-first with edges taken
//        in id order.

namespace transit::ptn {

struct Overrides {
  std::optional<int> T;
  std::optional<std::vector<int>> periods;
  std::optional<std::array<double, 5>> gamma;
  std::optional<double> lambda1, lambda3, lambda4;
  std::optional<double> demand;
};

namespace detail {

inline void add_default_stops(PtnInstance& inst, int n, int T) {
  for (int i = 1; i <= n; ++i) inst.stops.push_back({i, "v" + std::to_string(i), 1, 3, 2, 2 + T - 1});
}

inline void add_default_edge(PtnInstance& inst, int u, int v) {
  const int id = static_cast<int>(inst.edges.size()) + 1;
  inst.edges.push_back({id, u, v, 1.0, 2, 4, 1, 3});
}

inline void add_line(PtnInstance& inst, std::vector<int> edges) {
  Line l;
  l.id = static_cast<int>(inst.pool.size()) + 1;
  l.edges = std::move(edges);
  double len = 0.0;
  for (int e : l.edges) len += inst.edge(e).length;
  l.cost = 1.0 + len;
  inst.pool.push_back(std::move(l));
}

// Reachability along edge orientation.
inline std::vector<std::vector<bool>> directed_reach(const PtnInstance& inst) {
  const std::size_t n = inst.stops.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = true;
  for (const auto& e : inst.edges) r[inst.stop_pos(e.u)][inst.stop_pos(e.v)] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

inline void apply(PtnInstance& inst, const Overrides& o) {
  Params& p = inst.params;
  if (o.T) {
    p.T = *o.T;
    for (auto& s : inst.stops) s.U_trans = s.L_trans + p.T - 1;
  }
  if (o.periods) {
    p.periods = *o.periods;
    std::sort(p.periods.begin(), p.periods.end());
    p.periods.erase(std::unique(p.periods.begin(), p.periods.end()), p.periods.end());
  }
  if (o.gamma) p.gamma = *o.gamma;
  if (o.lambda1) p.lambda1 = *o.lambda1;
  if (o.lambda3) p.lambda3 = *o.lambda3;
  if (o.lambda4) p.lambda4 = *o.lambda4;
  const auto reach = directed_reach(inst);
  const double demand = o.demand.value_or(10.0);
  inst.od.clear();
  for (const auto& a : inst.stops)
    for (const auto& b : inst.stops)
      if (a.id < b.id && reach[inst.stop_pos(a.id)][inst.stop_pos(b.id)]) inst.od[{a.id, b.id}] = demand;
}

}  // namespace detail

inline PtnInstance make_small(const Overrides& o = {}) {
  PtnInstance inst;
  inst.name = "small";
  detail::add_default_stops(inst, 4, 10);
  for (int i = 1; i <= 3; ++i) detail::add_default_edge(inst, i, i + 1);
  for (int e = 1; e <= 3; ++e) detail::add_line(inst, {e});
  detail::add_line(inst, {1, 2});
  detail::add_line(inst, {2, 3});
  detail::add_line(inst, {1, 2, 3});
  inst.params.lambda3 = 1000.0;
  inst.params.lambda4 = 1.0;
  detail::apply(inst, o);
  finalize_lines(inst);
  validate(inst);
  return inst;
}

inline PtnInstance make_toy(const Overrides& o = {}) {
  PtnInstance inst;
  inst.name = "toy";
  detail::add_default_stops(inst, 8, 10);
  const int uv[8][2] = {{1, 3}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {3, 6}, {6, 7}, {6, 8}};
  for (const auto& e : uv) detail::add_default_edge(inst, e[0], e[1]);
  for (int e = 1; e <= 8; ++e) detail::add_line(inst, {e});
  std::vector<int> path;
  std::function<void(int)> dfs = [&](int at) {
    bool extended = false;
    for (const auto& e : inst.edges)
      if (e.u == at) {
        extended = true;
        path.push_back(e.id);
        dfs(e.v);
        path.pop_back();
      }
    if (!extended) detail::add_line(inst, path);
  };
  for (int src : {1, 2}) dfs(src);
  inst.params.lambda3 = 10.0;
  inst.params.lambda4 = 1.0;
  detail::apply(inst, o);
  finalize_lines(inst);
  validate(inst);
  return inst;
}

struct RandomOptions {
  int min_stops = 4, max_stops = 5;
  int min_pool = 3, max_pool = 5;
  int max_periods = 2;
  int min_od = 2, max_od = 4;
  int min_T = 4, max_T = 6;
};

// Small random instances with a tree-shaped PTN (edges oriented away from
// stop 1) and lines along downward paths. Every edge has f_min = 1, every
// L_a >= 1 and U_a - L_a <= T - 1; transfer windows span a whole period.
inline PtnInstance make_random(std::uint32_t seed, const RandomOptions& ro = {}) {
  std::mt19937 rng(seed);
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint32_t>(hi - lo + 1)); };
  PtnInstance inst;
  inst.name = "random-" + std::to_string(seed);
  const int n = pick(ro.min_stops, ro.max_stops);
  const int T = pick(ro.min_T, ro.max_T);
  inst.params.T = T;
  for (int i = 1; i <= n; ++i) {
    const int lt = pick(1, 2);
    inst.stops.push_back({i, "s" + std::to_string(i), 1, pick(1, 2), lt, lt + T - 1});
  }
  std::vector<int> parent(n + 1, 0), parent_edge(n + 1, 0);
  for (int v = 2; v <= n; ++v) {
    parent[v] = pick(1, v - 1);
    const int ld = pick(1, 2);
    inst.edges.push_back({v - 1, parent[v], v, static_cast<double>(pick(1, 3)), ld, ld + pick(0, 1), 1, 3});
    parent_edge[v] = v - 1;
  }
  // Downward paths: from every ancestor a to every descendant d.
  std::vector<std::vector<int>> paths;
  for (int d = 2; d <= n; ++d) {
    std::vector<int> up;
    for (int v = d; v != 1; v = parent[v]) {
      up.insert(up.begin(), parent_edge[v]);
      paths.push_back(up);
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<bool> used(paths.size(), false), covered(n, false);
  std::vector<std::vector<int>> chosen;
  auto take = [&](std::size_t i) {
    used[i] = true;
    chosen.push_back(paths[i]);
    for (int e : paths[i]) covered[e] = true;
  };
  for (int e = 1; e < n; ++e) {
    if (covered[e]) continue;
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < paths.size(); ++i)
      if (!used[i] && std::find(paths[i].begin(), paths[i].end(), e) != paths[i].end()) cand.push_back(i);
    take(cand[rng() % cand.size()]);
  }
  const int target = std::min<int>(static_cast<int>(paths.size()), pick(ro.min_pool, ro.max_pool));
  while (static_cast<int>(chosen.size()) < target) {
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < paths.size(); ++i)
      if (!used[i]) cand.push_back(i);
    take(cand[rng() % cand.size()]);
  }
  for (auto& c : chosen) detail::add_line(inst, c);
  // The cover above may load an edge more than f_max times; widen when needed.
  for (auto& e : inst.edges) {
    int load = 0;
    for (const auto& l : inst.pool) load += std::count(l.edges.begin(), l.edges.end(), e.id) > 0;
    e.f_max = std::max(e.f_max, std::min(load, static_cast<int>(inst.pool.size())));
  }
  inst.params.periods = pick(1, ro.max_periods) == 1 ? std::vector<int>{0} : std::vector<int>{0, 1};
  std::vector<std::pair<int, int>> pairs;
  for (int d = 2; d <= n; ++d)
    for (int a = parent[d]; a != 0; a = parent[a]) pairs.push_back({a, d});
  std::sort(pairs.begin(), pairs.end());
  const int k = std::min<int>(static_cast<int>(pairs.size()), pick(ro.min_od, ro.max_od));
  for (int i = 0; i < k; ++i) {
    const std::size_t j = rng() % pairs.size();
    inst.od[pairs[j]] = pick(1, 10);
    pairs.erase(pairs.begin() + static_cast<long>(j));
  }
  inst.params.lambda1 = 0.0;
  inst.params.lambda3 = 1.0;
  inst.params.lambda4 = 1.0;
  finalize_lines(inst);
  validate(inst);
  return inst;
}

}  // namespace transit::ptn
