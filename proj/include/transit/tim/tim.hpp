#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "transit/ean/network.hpp"
#include "transit/error.hpp"
#include "transit/framework/stage.hpp"
#include "transit/milp/linearize.hpp"
#include "transit/pass/pass.hpp"

namespace transit::tim {

using framework::Block;
using framework::Values;
using milp::LinExpr;
using milp::MilpModel;
using milp::Sense;

// Big-M of the upper window bound. With eta_a = 0 some z_a puts dur_a into
// [0, T-1], so M_a = T - 1 - U_a suffices.
inline double big_m(const ean::Network& n, const ean::Activity& a) {
  if (n.inst.params.big_M) return *n.inst.params.big_M;
  return std::max(0, n.inst.params.T - 1 - a.U);
}

// Upper bound of dur_a over all feasible timetables, active or not.
inline double dur_max(const ean::Network& n, const ean::Activity& a) { return a.U + big_m(n, a); }

inline int z_max(const ean::Network& n, const ean::Activity& a) {
  const int T = n.inst.params.T;
  const double top = std::max(dur_max(n, a), static_cast<double>(T - 1));
  return static_cast<int>(std::floor((top + T - 1) / T));
}

// Block layout: pi of the base events, then z of the base activities.
inline std::size_t z_index(const ean::Network& n, std::size_t a) { return n.base_events + a; }

inline LinExpr duration(const ean::Network& n, const Block& t, std::size_t a) {
  const auto& act = n.net.activities[a];
  return t[act.head] - t[act.tail] + t[z_index(n, a)] * n.inst.params.T;
}

inline double duration(const ean::Network& n, const Values& t, std::size_t a) {
  const auto& act = n.net.activities[a];
  return t.at(act.head) - t.at(act.tail) + t.at(z_index(n, a)) * n.inst.params.T;
}

// eta_a = y_{l1} y_{l2}; equals y_l on the drive and wait activities of l.
inline LinExpr activation(MilpModel& m, const ean::Network& n, const Block& y, std::size_t a) {
  const auto& act = n.net.activities[a];
  const LinExpr& y1 = y[n.line_index(act.line1)];
  if (act.kind != ean::ActivityKind::Transfer) return y1;
  const LinExpr& y2 = y[n.line_index(act.line2)];
  if (!y1.has_terms()) return y2 * y1.constant();
  if (!y2.has_terms()) return y1 * y2.constant();
  const std::string id = std::to_string(act.id);
  const LinExpr eta(m.add_binary("eta_" + id));
  m.add_constraint(eta - y1, Sense::LessEqual, 0.0, "tim_tmp1_a" + id);
  m.add_constraint(eta - y2, Sense::LessEqual, 0.0, "tim_tmp2_a" + id);
  m.add_constraint(eta - y1 - y2, Sense::GreaterEqual, -1.0, "tim_tmp3_a" + id);
  return eta;
}

inline double activation(const ean::Network& n, const Values& y, std::size_t a) {
  const auto& act = n.net.activities[a];
  double v = std::lround(y.at(n.line_index(act.line1)));
  if (act.kind == ean::ActivityKind::Transfer) v *= std::lround(y.at(n.line_index(act.line2)));
  return v;
}

inline Block declare_tim(const ean::Network& n, MilpModel& m) {
  Block t;
  const int T = n.inst.params.T;
  for (std::size_t e = 0; e < n.base_events; ++e)
    t.emplace_back(m.add_integer("pi_" + std::to_string(n.net.events[e].id), 0, T - 1));
  for (std::size_t a = 0; a < n.base_activities; ++a)
    t.emplace_back(m.add_integer("z_" + std::to_string(n.net.activities[a].id), 0, z_max(n, n.net.activities[a])));
  return t;
}

// TT1/TT2 on every base activity and p_a <= eta_a on transfers.
inline void constrain_tim(const ean::Network& n, MilpModel& m, const Block& y, const Block& p, const Block& t) {
  for (std::size_t a = 0; a < n.base_activities; ++a) {
    const auto& act = n.net.activities[a];
    const std::string id = std::to_string(act.id);
    const LinExpr eta = activation(m, n, y, a);
    const LinExpr dur = duration(n, t, a);
    const double M = big_m(n, act);
    m.add_constraint(dur - eta * act.L, Sense::GreaterEqual, 0.0, "tim_TT1_a" + id);
    m.add_constraint(dur + eta * M, Sense::LessEqual, act.U + M, "tim_TT2_a" + id);
    if (act.kind != ean::ActivityKind::Transfer || !eta.has_terms()) continue;
    for (std::size_t k = 0; k < n.od.size(); ++k) {
      const LinExpr& pa = p[pass::p_index(n, k, a)];
      if (!pa.has_terms() || milp::expr_range(m, pa).second <= 0.0) continue;
      const auto [u, v] = n.od[k].first;
      m.add_constraint(pa - eta, Sense::LessEqual, 0.0,
                       "tim_PE_" + std::to_string(u) + "_" + std::to_string(v) + "_a" + id);
    }
  }
}

// Sum over OD pairs and base activities of C p_a dur_a. A variable p_a is
// handled by d >= dur - M_d (1 - p), d >= L_a p, d >= 0, which is exact at the
// optimum because d carries a positive weight.
inline LinExpr objective_tim(const ean::Network& n, MilpModel& m, const Block& p, const Block& t) {
  LinExpr f;
  for (std::size_t a = 0; a < n.base_activities; ++a) {
    const auto& act = n.net.activities[a];
    const LinExpr dur = duration(n, t, a);
    const double md = dur_max(n, act);
    double fixed_weight = 0.0;
    for (std::size_t k = 0; k < n.od.size(); ++k) {
      const LinExpr& pa = p[pass::p_index(n, k, a)];
      const double c = n.od[k].second;
      if (!pa.has_terms()) {
        fixed_weight += c * pa.constant();
        continue;
      }
      if (milp::expr_range(m, pa).second <= 0.0) continue;
      const auto [u, v] = n.od[k].first;
      const std::string name = "d_" + std::to_string(u) + "_" + std::to_string(v) + "_" + std::to_string(act.id);
      const LinExpr d(m.add_integer(name, 0, md));
      m.add_constraint(d - dur - pa * md, Sense::GreaterEqual, -md, name + "_ge");
      m.add_constraint(d - pa * act.L, Sense::GreaterEqual, 0.0, name + "_lb");
      f += d * c;
    }
    if (fixed_weight != 0.0) f += dur * fixed_weight;
  }
  return f;
}

struct Timetable {
  std::map<int, int> pi;        // event id -> pi
  std::map<int, int> z;         // activity id -> z
  std::map<int, int> eta;       // activity id -> eta
  std::map<int, int> duration;  // activity id -> dur
};

inline Timetable to_timetable(const ean::Network& n, const Values& y, const Values& t) {
  Timetable tt;
  for (std::size_t e = 0; e < n.base_events; ++e) tt.pi[n.net.events[e].id] = static_cast<int>(std::lround(t.at(e)));
  for (std::size_t a = 0; a < n.base_activities; ++a) {
    const int id = n.net.activities[a].id;
    tt.z[id] = static_cast<int>(std::lround(t.at(z_index(n, a))));
    tt.eta[id] = static_cast<int>(activation(n, y, a));
    tt.duration[id] = static_cast<int>(std::lround(duration(n, t, a)));
  }
  return tt;
}

// Sum of C_{u,v} dur_a over the routed paths; aux arcs take no time.
inline double evaluate_f3(const ean::Network& n, const pass::RoutingResult& r, const Timetable& tt) {
  double f = 0.0;
  for (const auto& route : r.routes)
    for (int id : route.activities) {
      const auto it = tt.duration.find(id);
      if (it == tt.duration.end()) continue;  // aux arc
      const auto& act = n.net.activities.at(static_cast<std::size_t>(id));
      if (it->second < act.L || it->second > act.U)
        throw InfeasibleTimetable("activity " + std::to_string(id) + " on a route violates its window");
      f += route.demand * it->second;
    }
  return f;
}

// Each line runs its activities at their lower bounds from pi = 0 at its first
// event; transfers take the shortest duration of at least L. Feasible whenever
// every active transfer window spans a full period.
inline Values greedy_timetable(const ean::Network& n, const Values& y) {
  const int T = n.inst.params.T;
  Values t(n.base_events + n.base_activities, 0.0);
  auto set_z = [&](std::size_t a, int dur) {
    const auto& act = n.net.activities[a];
    t[z_index(n, a)] = (dur - (t[act.head] - t[act.tail])) / T;
  };
  for (const auto& l : n.inst.pool)
    for (int a : n.net.line_activities(l.id)) {
      const auto& act = n.net.activities[a];
      t[act.head] = (static_cast<int>(t[act.tail]) + act.L) % T;
      set_z(a, act.L);
    }
  for (std::size_t a = 0; a < n.base_activities; ++a) {
    const auto& act = n.net.activities[a];
    if (act.kind != ean::ActivityKind::Transfer) continue;
    const int diff = static_cast<int>(t[act.head] - t[act.tail]);
    const int lo = activation(n, y, a) > 0.5 ? act.L : 0;
    set_z(a, lo + ((diff - lo) % T + T) % T);
  }
  return t;
}

struct TimBlock {
  Block t;
  LinExpr objective;
};

inline TimBlock build_tim(const ean::Network& n, MilpModel& m, const Block& y, const Block& p) {
  TimBlock b;
  b.t = declare_tim(n, m);
  constrain_tim(n, m, y, p, b.t);
  b.objective = objective_tim(n, m, p, b.t);
  return b;
}

class TimStage : public framework::Stage {
 public:
  explicit TimStage(std::shared_ptr<const ean::Network> net) : net_(std::move(net)) {}
  std::string name() const override { return "tim"; }
  Block declare(MilpModel& m) const override { return declare_tim(*net_, m); }
  void constrain(MilpModel& m, const std::vector<Block>& prev, const Block& own) const override {
    constrain_tim(*net_, m, prev.at(0), prev.at(1), own);
  }
  LinExpr objective(MilpModel& m, const std::vector<Block>& prev, const Block& own) const override {
    return objective_tim(*net_, m, prev.at(1), own);
  }
  std::optional<Values> heuristic(const std::vector<Values>& prev) const override {
    return greedy_timetable(*net_, prev.at(0));
  }
  double evaluate(const std::vector<Values>& blocks) const override {
    const auto& n = *net_;
    double f = 0.0;
    for (std::size_t k = 0; k < n.od.size(); ++k)
      for (std::size_t a = 0; a < n.base_activities; ++a)
        if (blocks[1].at(pass::p_index(n, k, a)) > 0.5) f += n.od[k].second * duration(n, blocks[2], a);
    return f;
  }

 private:
  std::shared_ptr<const ean::Network> net_;
};

// timetable.csv: event_id;pi. activities.csv: activity_id;z;eta;duration.
inline void write_csv(const Timetable& tt, const std::filesystem::path& timetable_file,
                      const std::filesystem::path& activities_file) {
  std::ofstream ev(timetable_file), ac(activities_file);
  if (!ev || !ac) throw IoError("cannot write timetable files");
  ev << "event_id;pi\n";
  for (const auto& [e, v] : tt.pi) ev << e << ';' << v << '\n';
  ac << "activity_id;z;eta;duration\n";
  for (const auto& [a, z] : tt.z) ac << a << ';' << z << ';' << tt.eta.at(a) << ';' << tt.duration.at(a) << '\n';
}

}  // namespace transit::tim
