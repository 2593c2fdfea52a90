#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "transit/ean/network.hpp"
#include "transit/error.hpp"
#include "transit/framework/stage.hpp"
#include "transit/milp/linearize.hpp"

namespace transit::pass {

using framework::Block;
using framework::Values;
using milp::LinExpr;
using milp::MilpModel;
using milp::Sense;

struct Route {
  int u = 0, v = 0;
  double demand = 0.0;
  std::vector<int> activities;  // activity ids, source to target
  double length = 0.0;          // sum of routing weights
};

struct RoutingResult {
  std::vector<Route> routes;     // OD order
  double f2 = 0.0;
  std::map<int, double> load;    // activity id -> w_a
};

// Routing weight of an activity: L_a, plus the transfer penalty on transfers.
inline double weight(const ean::Network& n, const ean::Activity& a) {
  return a.L + (a.kind == ean::ActivityKind::Transfer ? n.inst.params.transfer_penalty : 0.0);
}

// Activities lying on some (u, source) -> (v, target) path of the full pool network.
inline std::vector<bool> reachable_arcs(const ean::Network& n, int u, int v) {
  const ean::Ean& g = n.net;
  auto sweep = [&](int start, bool forward) {
    std::vector<bool> seen(g.events.size(), false);
    std::vector<int> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      const int e = stack.back();
      stack.pop_back();
      for (int a : forward ? g.out(e) : g.in(e)) {
        const int next = forward ? g.activities[a].head : g.activities[a].tail;
        if (!seen[next]) {
          seen[next] = true;
          stack.push_back(next);
        }
      }
    }
    return seen;
  };
  const auto fwd = sweep(g.source(u), true);
  const auto bwd = sweep(g.target(v), false);
  std::vector<bool> on(g.activities.size());
  for (std::size_t a = 0; a < on.size(); ++a) on[a] = fwd[g.activities[a].tail] && bwd[g.activities[a].head];
  return on;
}

// Index of p_a^{u,v} in the pass block.
inline std::size_t p_index(const ean::Network& n, std::size_t od, std::size_t a) {
  return od * n.net.activities.size() + a;
}

// Binaries p_a^{u,v} for every positive-demand OD pair and every activity of the
// extended network. Arcs off every (u, source) -> (v, target) path are fixed to 0.
inline Block declare_pass(const ean::Network& n, MilpModel& m) {
  Block p;
  for (const auto& [uv, c] : n.od) {
    const auto on = reachable_arcs(n, uv.first, uv.second);
    for (std::size_t a = 0; a < n.net.activities.size(); ++a) {
      const auto id = m.add_binary("p_" + std::to_string(uv.first) + "_" + std::to_string(uv.second) + "_" +
                                   std::to_string(n.net.activities[a].id));
      if (!on[a]) m.set_bounds(id, 0.0, 0.0);
      p.emplace_back(id);
    }
  }
  return p;
}

// Flow conservation A p = b per OD pair and p_a <= y_l on the drive and wait
// activities of line l.
inline void constrain_pass(const ean::Network& n, MilpModel& m, const Block& y, const Block& p) {
  const ean::Ean& g = n.net;
  for (std::size_t k = 0; k < n.od.size(); ++k) {
    const auto [u, v] = n.od[k].first;
    const std::string tag = std::to_string(u) + "_" + std::to_string(v);
    const auto b = g.demand_vector(u, v);
    for (std::size_t e = 0; e < g.events.size(); ++e) {
      LinExpr flow;
      for (int a : g.out(static_cast<int>(e))) flow += p[p_index(n, k, a)];
      for (int a : g.in(static_cast<int>(e))) flow -= p[p_index(n, k, a)];
      m.add_constraint(flow, Sense::Equal, b[e], "pass_P1_" + tag + "_e" + std::to_string(g.events[e].id));
    }
    for (std::size_t a = 0; a < g.activities.size(); ++a) {
      const auto& act = g.activities[a];
      if (act.kind != ean::ActivityKind::Drive && act.kind != ean::ActivityKind::Wait) continue;
      const LinExpr& pa = p[p_index(n, k, a)];
      if (milp::expr_range(m, pa).second <= 0.0) continue;
      m.add_constraint(pa - y[n.line_index(act.line1)], Sense::LessEqual, 0.0,
                       "pass_LP1_" + tag + "_a" + std::to_string(act.id));
    }
  }
}

inline LinExpr objective_pass(const ean::Network& n, const Block& p) {
  LinExpr f;
  for (std::size_t k = 0; k < n.od.size(); ++k)
    for (std::size_t a = 0; a < n.net.activities.size(); ++a) {
      const double w = weight(n, n.net.activities[a]);
      if (w != 0.0) f += p[p_index(n, k, a)] * (n.od[k].second * w);
    }
  return f;
}

// Follows the p = 1 arcs from (u, source) to (v, target).
inline RoutingResult to_routing(const ean::Network& n, const Values& p) {
  const ean::Ean& g = n.net;
  RoutingResult r;
  for (std::size_t k = 0; k < n.od.size(); ++k) {
    const auto [u, v] = n.od[k].first;
    Route route{u, v, n.od[k].second, {}, 0.0};
    int at = g.source(u);
    std::vector<bool> seen(g.events.size(), false);
    while (at != g.target(v)) {
      seen[at] = true;
      int next = -1;
      for (int a : g.out(at))
        if (p.at(p_index(n, k, a)) > 0.5 && !seen[g.activities[a].head]) {
          next = a;
          break;
        }
      if (next < 0) throw Unroutable(u, v);
      route.activities.push_back(g.activities[next].id);
      route.length += weight(n, g.activities[next]);
      at = g.activities[next].head;
    }
    for (int a : route.activities) r.load[a] += route.demand;
    r.f2 += route.demand * route.length;
    r.routes.push_back(std::move(route));
  }
  return r;
}

struct PassBlock {
  Block p;
  LinExpr objective;
};

inline PassBlock build_pass(const ean::Network& n, MilpModel& m, const Block& y) {
  PassBlock b;
  b.p = declare_pass(n, m);
  constrain_pass(n, m, y, b.p);
  b.objective = objective_pass(n, b.p);
  return b;
}

class PassStage : public framework::Stage {
 public:
  explicit PassStage(std::shared_ptr<const ean::Network> net) : net_(std::move(net)) {}
  std::string name() const override { return "pass"; }
  Block declare(MilpModel& m) const override { return declare_pass(*net_, m); }
  void constrain(MilpModel& m, const std::vector<Block>& prev, const Block& own) const override {
    constrain_pass(*net_, m, prev.at(0), own);
  }
  LinExpr objective(MilpModel&, const std::vector<Block>&, const Block& own) const override {
    return objective_pass(*net_, own);
  }
  std::optional<Values> heuristic(const std::vector<Values>& prev) const override;
  double evaluate(const std::vector<Values>& blocks) const override {
    double f = 0.0;
    for (std::size_t k = 0; k < net_->od.size(); ++k)
      for (std::size_t a = 0; a < net_->net.activities.size(); ++a)
        f += std::lround(blocks[1].at(p_index(*net_, k, a))) * net_->od[k].second *
             weight(*net_, net_->net.activities[a]);
    return f;
  }

 private:
  std::shared_ptr<const ean::Network> net_;
};

// Label-setting shortest paths on the network restricted to `chosen` lines.
// Among equally short paths the one with the lexicographically smallest
// sequence of activity ids wins.
inline RoutingResult route_oracle(const ean::Network& n, const std::set<int>& chosen) {
  const ean::Ean g = ean::restrict(n.net, chosen);
  const double inf = std::numeric_limits<double>::infinity();
  auto dijkstra = [&](int start, bool forward) {
    std::vector<double> dist(g.events.size(), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
    dist[start] = 0.0;
    q.push({0.0, start});
    while (!q.empty()) {
      auto [d, e] = q.top();
      q.pop();
      if (d > dist[e]) continue;
      for (int a : forward ? g.out(e) : g.in(e)) {
        const auto& act = g.activities[a];
        const int next = forward ? act.head : act.tail;
        const double nd = d + weight(n, act);
        if (nd < dist[next]) {
          dist[next] = nd;
          q.push({nd, next});
        }
      }
    }
    return dist;
  };
  RoutingResult r;
  for (const auto& [uv, c] : n.od) {
    const auto [u, v] = uv;
    const int s = g.source(u), t = g.target(v);
    const auto ds = dijkstra(s, true);
    const auto dt = dijkstra(t, false);
    if (ds[t] == inf) throw Unroutable(u, v);
    Route route{u, v, c, {}, ds[t]};
    std::vector<bool> seen(g.events.size(), false);
    for (int at = s; at != t;) {
      seen[at] = true;
      int best = -1;
      for (int a : g.out(at)) {
        const auto& act = g.activities[a];
        const double w = weight(n, act);
        if (seen[act.head] || ds[at] + w != ds[act.head] || ds[act.head] + dt[act.head] != ds[t]) continue;
        if (best < 0 || act.id < g.activities[best].id) best = a;
      }
      if (best < 0) throw Unroutable(u, v);
      route.activities.push_back(g.activities[best].id);
      at = g.activities[best].head;
    }
    for (int a : route.activities) r.load[a] += c;
    r.f2 += c * route.length;
    r.routes.push_back(std::move(route));
  }
  return r;
}

// Pass block values of a routing.
inline Values to_values(const ean::Network& n, const RoutingResult& r) {
  Values p(n.od.size() * n.net.activities.size(), 0.0);
  for (std::size_t k = 0; k < r.routes.size(); ++k)
    for (int id : r.routes[k].activities) p[p_index(n, k, static_cast<std::size_t>(id))] = 1.0;
  return p;
}

// Shortest paths on the chosen lines; these are optimal for the stage.
inline std::optional<Values> PassStage::heuristic(const std::vector<Values>& prev) const {
  std::set<int> chosen;
  for (std::size_t i = 0; i < net_->inst.pool.size(); ++i)
    if (prev.at(0).at(i) > 0.5) chosen.insert(net_->inst.pool[i].id);
  try {
    return to_values(*net_, route_oracle(*net_, chosen));
  } catch (const Unroutable&) {
    return std::nullopt;
  }
}

inline void write_csv(const RoutingResult& r, const std::filesystem::path& file) {
  std::ofstream os(file);
  if (!os) throw IoError("cannot write " + file.string());
  os << "u;v;activity_ids;length\n";
  for (const auto& x : r.routes) {
    os << x.u << ';' << x.v << ';';
    for (std::size_t i = 0; i < x.activities.size(); ++i) os << (i ? "," : "") << x.activities[i];
    os << ';' << x.length << '\n';
  }
}

}  // namespace transit::pass
