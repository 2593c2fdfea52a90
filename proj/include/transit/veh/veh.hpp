#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "transit/ean/network.hpp"
#include "transit/error.hpp"
#include "transit/framework/stage.hpp"
#include "transit/lin/lin.hpp"
#include "transit/milp/linearize.hpp"
#include "transit/tim/tim.hpp"

namespace transit::veh {

using framework::Block;
using framework::Values;
using milp::LinExpr;
using milp::MilpModel;
using milp::Sense;

constexpr int kDepot = -1;

struct Trip {
  int period = 0;  // t
  int line = 0;    // line id
  double alpha = 0.0, omega = 0.0, delta = 0.0;
  bool operator==(const Trip&) const = default;
};

// Trip slot (t, l) of the full pool: index = period_index * |pool| + line_index.
struct Slot {
  int period = 0;
  int line_index = 0;
};

inline std::vector<Slot> slots(const ean::Network& n) {
  std::vector<Slot> s;
  for (int t : n.inst.params.periods)
    for (std::size_t l = 0; l < n.inst.pool.size(); ++l) s.push_back({t, static_cast<int>(l)});
  return s;
}

// Candidate links: depot -> trip, trip -> trip (distinct), trip -> depot.
struct Arc {
  int from = kDepot, to = kDepot;  // slot indices
};

inline std::vector<Arc> arcs(const ean::Network& n) {
  const int k = static_cast<int>(slots(n).size());
  std::vector<Arc> a;
  for (int j = 0; j < k; ++j) a.push_back({kDepot, j});
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) a.push_back({i, j});
  for (int i = 0; i < k; ++i) a.push_back({i, kDepot});
  return a;
}

inline const ptn::Deadhead& deadhead(const ean::Network& n, const Arc& a) {
  const auto s = slots(n);
  const auto& pool = n.inst.pool;
  if (a.from == kDepot) return n.inst.depot_out.at(pool[s[a.to].line_index].id);
  if (a.to == kDepot) return n.inst.depot_in.at(pool[s[a.from].line_index].id);
  return n.inst.turnaround.at({pool[s[a.from].line_index].id, pool[s[a.to].line_index].id});
}

// A(l) of every pool line, as activity positions.
inline std::vector<std::vector<int>> line_activities(const ean::Network& n) {
  std::vector<std::vector<int>> out;
  for (const auto& l : n.inst.pool) out.push_back(n.net.line_activities(l.id));
  return out;
}

// The trip anchor first(l): the arrival event at the first stop.
inline int first_event(const ean::Network& n, int line_index) {
  const auto& l = n.inst.pool[line_index];
  return n.net.arr(l.first_stop(), l.id);
}

inline std::string slot_name(const ean::Network& n, const Slot& s) {
  return std::to_string(s.period) + "_" + std::to_string(n.inst.pool[s.line_index].id);
}

inline std::string arc_name(const ean::Network& n, const std::vector<Slot>& s, const Arc& a) {
  return (a.from == kDepot ? std::string("depot") : slot_name(n, s[a.from])) + "__" +
         (a.to == kDepot ? std::string("depot") : slot_name(n, s[a.to]));
}

// One binary per candidate link. A trip pair is fixed to 0 when even the
// earliest end of the first trip (all activities at their lower bound, anchor
// at 0) and the latest start of the second cannot be L_{l1,l2} apart.
inline Block declare_veh(const ean::Network& n, MilpModel& m) {
  const auto s = slots(n);
  const auto acts = line_activities(n);
  const int T = n.inst.params.T;
  Block x;
  for (const auto& a : arcs(n)) {
    const auto id = m.add_binary("x_" + arc_name(n, s, a));
    if (a.from != kDepot && a.to != kDepot) {
      double min_delta = 0.0;
      for (int act : acts[s[a.from].line_index]) min_delta += n.net.activities[act].L;
      const double latest_gap = (s[a.to].period - s[a.from].period) * T + (T - 1) - min_delta;
      if (latest_gap < deadhead(n, a).time) m.set_bounds(id, 0.0, 0.0);
    }
    x.emplace_back(id);
  }
  return x;
}

struct TripExprs {
  std::vector<LinExpr> alpha, omega;  // per slot
  std::vector<LinExpr> delta;         // per line
  std::vector<double> delta_max;      // per line, over all feasible timetables
};

inline TripExprs trip_exprs(const ean::Network& n, const Block& t) {
  TripExprs e;
  const auto acts = line_activities(n);
  for (std::size_t l = 0; l < n.inst.pool.size(); ++l) {
    LinExpr d;
    double hi = 0.0;
    for (int a : acts[l]) {
      d += tim::duration(n, t, a);
      hi += tim::dur_max(n, n.net.activities[a]);
    }
    e.delta.push_back(d);
    e.delta_max.push_back(hi);
  }
  for (const auto& s : slots(n)) {
    const LinExpr alpha = t[first_event(n, s.line_index)] + LinExpr(double(s.period) * n.inst.params.T);
    e.alpha.push_back(alpha);
    e.omega.push_back(alpha + e.delta[s.line_index]);
  }
  return e;
}

// Degree constraints (every trip of a chosen line has one predecessor and one
// successor, none otherwise) and the turnaround condition
//   alpha_2 - omega_1 >= x L_12 - M'(1 - x)
// with M' sized per pair from the range of omega_1 - alpha_2.
inline void constrain_veh(const ean::Network& n, MilpModel& m, const Block& y, const Block& t, const Block& x) {
  const auto s = slots(n);
  const auto as = arcs(n);
  const auto te = trip_exprs(n, t);
  const int T = n.inst.params.T;
  std::vector<LinExpr> in(s.size()), out(s.size());
  for (std::size_t i = 0; i < as.size(); ++i) {
    if (as[i].to != kDepot) in[as[i].to] += x[i];
    if (as[i].from != kDepot) out[as[i].from] += x[i];
  }
  for (std::size_t j = 0; j < s.size(); ++j) {
    const LinExpr& yl = y[s[j].line_index];
    m.add_constraint(in[j] - yl, Sense::Equal, 0.0, "veh_LV1_" + slot_name(n, s[j]));
    m.add_constraint(out[j] - yl, Sense::Equal, 0.0, "veh_LV2_" + slot_name(n, s[j]));
  }
  for (std::size_t i = 0; i < as.size(); ++i) {
    const Arc& a = as[i];
    if (a.from == kDepot || a.to == kDepot) continue;
    if (milp::expr_range(m, x[i]).second <= 0.0) continue;
    const double L = deadhead(n, a).time;
    const LinExpr slack = te.alpha[a.to] - te.omega[a.from];
    double M;
    if (n.inst.params.big_M_prime) {
      M = *n.inst.params.big_M_prime;
    } else if (!slack.has_terms()) {
      M = std::max(0.0, L - slack.constant());
    } else {
      const double max_omega = s[a.from].period * T + (T - 1) + te.delta_max[s[a.from].line_index];
      const double min_alpha = s[a.to].period * T;
      M = std::max(0.0, L + max_omega - min_alpha);
    }
    m.add_constraint(slack - x[i] * (L + M), Sense::GreaterEqual, -M, "veh_V1_" + arc_name(n, s, a));
  }
}

// gamma_1 sum y delta + gamma_2 sum y length + gamma_3 (idle time between linked
// trips + depot times) + gamma_4 deadhead distance + gamma_5 vehicles. Products
// with variable timetables are linearized from below.
inline LinExpr objective_veh(const ean::Network& n, MilpModel& m, const Block& y, const Block& t, const Block& x) {
  const auto& g = n.inst.params.gamma;
  const auto s = slots(n);
  const auto as = arcs(n);
  const auto te = trip_exprs(n, t);
  const int T = n.inst.params.T;
  const double periods = static_cast<double>(n.inst.params.periods.size());
  LinExpr f;
  for (std::size_t l = 0; l < n.inst.pool.size(); ++l) {
    const auto& line = n.inst.pool[l];
    const LinExpr& yl = y[l];
    if (g[0] != 0.0) {
      LinExpr yd;
      if (!yl.has_terms() || !te.delta[l].has_terms()) {
        yd = milp::product(m, yl, te.delta[l], "");
      } else {
        const double H = te.delta_max[l];
        const std::string name = "e_" + std::to_string(line.id);
        yd = LinExpr(m.add_integer(name, 0, H));
        m.add_constraint(yd - te.delta[l] - yl * H, Sense::GreaterEqual, -H, name + "_ge");
      }
      f += yd * (g[0] * periods);
    }
    if (g[1] != 0.0) f += yl * (g[1] * periods * line.length);
  }
  for (std::size_t i = 0; i < as.size(); ++i) {
    const Arc& a = as[i];
    const LinExpr& xa = x[i];
    if (milp::expr_range(m, xa).second <= 0.0) continue;
    const auto& dh = deadhead(n, a);
    if (a.from == kDepot || a.to == kDepot) {
      f += xa * (g[2] * dh.time + g[3] * dh.distance + (a.from == kDepot ? g[4] : 0.0));
      continue;
    }
    f += xa * (g[3] * dh.distance);
    if (g[2] == 0.0) continue;
    const LinExpr slack = te.alpha[a.to] - te.omega[a.from];
    if (!slack.has_terms() || !xa.has_terms()) {
      f += milp::product(m, xa, slack, "") * g[2];
      continue;
    }
    const double G = std::max(0.0, double((s[a.to].period - s[a.from].period) * T + (T - 1)));
    const std::string name = "g_" + arc_name(n, s, a);
    const LinExpr gap(m.add_integer(name, 0, G));
    m.add_constraint(gap - slack - xa * G, Sense::GreaterEqual, -G, name + "_ge");
    f += gap * g[2];
  }
  return f;
}

struct VehicleSchedule {
  std::vector<std::vector<std::pair<int, int>>> vehicles;  // chains of (period, line id)
};

struct CostBreakdown {
  double trip_time = 0.0;      // gamma_1 sum delta
  double trip_distance = 0.0;  // gamma_2 sum length
  double idle_time = 0.0;      // gamma_3 (linked gaps + depot times)
  double deadhead = 0.0;       // gamma_4 deadhead distances
  double vehicles = 0.0;       // gamma_5 count
  int vehicle_count = 0;

  double total() const { return trip_time + trip_distance + idle_time + deadhead + vehicles; }
  CostBreakdown& operator+=(const CostBreakdown& o) {
    trip_time += o.trip_time;
    trip_distance += o.trip_distance;
    idle_time += o.idle_time;
    deadhead += o.deadhead;
    vehicles += o.vehicles;
    vehicle_count += o.vehicle_count;
    return *this;
  }
};

inline nlohmann::json to_json(const CostBreakdown& c) {
  return {{"trip_time", c.trip_time},   {"trip_distance", c.trip_distance}, {"idle_time", c.idle_time},
          {"deadhead", c.deadhead},     {"vehicles", c.vehicles},           {"vehicle_count", c.vehicle_count},
          {"total", c.total()}};
}

// One trip per period and chosen line, in period then pool order.
inline std::vector<Trip> rollout(const ean::Network& n, const lin::LinePlan& plan, const tim::Timetable& tt) {
  std::vector<Trip> trips;
  const int T = n.inst.params.T;
  for (int t : n.inst.params.periods)
    for (std::size_t l = 0; l < n.inst.pool.size(); ++l) {
      const auto& line = n.inst.pool[l];
      if (!plan.chosen.at(line.id)) continue;
      double delta = 0.0;
      for (int a : n.net.line_activities(line.id)) delta += tt.duration.at(n.net.activities[a].id);
      const double alpha = t * T + tt.pi.at(n.net.events[first_event(n, static_cast<int>(l))].id);
      trips.push_back({t, line.id, alpha, alpha + delta, delta});
    }
  return trips;
}

inline VehicleSchedule to_schedule(const ean::Network& n, const Values& x) {
  const auto s = slots(n);
  const auto as = arcs(n);
  std::vector<int> next(s.size(), -2);
  VehicleSchedule vs;
  std::vector<int> starts;
  for (std::size_t i = 0; i < as.size(); ++i) {
    if (x.at(i) < 0.5) continue;
    if (as[i].from == kDepot) starts.push_back(as[i].to);
    else {
      if (next[as[i].from] != -2) throw InvalidSchedule("trip with two successors");
      next[as[i].from] = as[i].to;
    }
  }
  for (int j : starts) {
    std::vector<std::pair<int, int>> chain;
    for (int at = j; at != kDepot; at = next[at]) {
      if (at == -2) throw InvalidSchedule("chain does not return to the depot");
      if (chain.size() > s.size()) throw InvalidSchedule("cyclic chain");
      chain.push_back({s[at].period, n.inst.pool[s[at].line_index].id});
    }
    vs.vehicles.push_back(std::move(chain));
  }
  return vs;
}

// Cost of one vehicle chain; checks that every link leaves enough turnaround.
inline CostBreakdown chain_cost(const ean::Network& n, const std::map<std::pair<int, int>, const Trip*>& by_key,
                                const std::vector<std::pair<int, int>>& chain) {
  const auto& g = n.inst.params.gamma;
  CostBreakdown c;
  if (chain.empty()) throw InvalidSchedule("empty vehicle");
  c.vehicle_count = 1;
  c.vehicles = g[4];
  const Trip* prev = nullptr;
  for (const auto& key : chain) {
    auto it = by_key.find(key);
    if (it == by_key.end())
      throw InvalidSchedule("unknown trip " + std::to_string(key.first) + ":" + std::to_string(key.second));
    const Trip* tr = it->second;
    const auto& line = n.inst.line(tr->line);
    c.trip_time += g[0] * tr->delta;
    c.trip_distance += g[1] * line.length;
    const ptn::Deadhead& dh = prev ? n.inst.turnaround.at({prev->line, tr->line}) : n.inst.depot_out.at(tr->line);
    if (prev) {
      const double gap = tr->alpha - prev->omega;
      if (gap < dh.time - 1e-9)
        throw InvalidSchedule("turnaround too short between " + std::to_string(prev->line) + " and " +
                              std::to_string(tr->line));
      c.idle_time += g[2] * gap;
    } else {
      c.idle_time += g[2] * dh.time;
    }
    c.deadhead += g[3] * dh.distance;
    prev = tr;
  }
  const auto& back = n.inst.depot_in.at(prev->line);
  c.idle_time += g[2] * back.time;
  c.deadhead += g[3] * back.distance;
  return c;
}

// Five-part cost of a schedule covering each trip exactly once.
inline CostBreakdown evaluate_f4(const ean::Network& n, const std::vector<Trip>& trips, const VehicleSchedule& vs) {
  std::map<std::pair<int, int>, const Trip*> by_key;
  for (const auto& t : trips) by_key[{t.period, t.line}] = &t;
  std::map<std::pair<int, int>, int> served;
  CostBreakdown total;
  for (const auto& chain : vs.vehicles) {
    total += chain_cost(n, by_key, chain);
    for (const auto& k : chain) ++served[k];
  }
  for (const auto& [k, tr] : by_key)
    if (served[k] != 1)
      throw InvalidSchedule("trip " + std::to_string(k.first) + ":" + std::to_string(k.second) + " served " +
                            std::to_string(served[k]) + " times");
  if (served.size() != by_key.size()) throw InvalidSchedule("schedule serves a trip that is not operated");
  return total;
}

struct VehBlock {
  Block x;
  LinExpr objective;
};

inline VehBlock build_veh(const ean::Network& n, MilpModel& m, const Block& y, const Block& t) {
  VehBlock b;
  b.x = declare_veh(n, m);
  constrain_veh(n, m, y, t, b.x);
  b.objective = objective_veh(n, m, y, t, b.x);
  return b;
}

class VehStage : public framework::Stage {
 public:
  explicit VehStage(std::shared_ptr<const ean::Network> net) : net_(std::move(net)) {}
  std::string name() const override { return "veh"; }
  Block declare(MilpModel& m) const override { return declare_veh(*net_, m); }
  void constrain(MilpModel& m, const std::vector<Block>& prev, const Block& own) const override {
    constrain_veh(*net_, m, prev.at(0), prev.at(2), own);
  }
  LinExpr objective(MilpModel& m, const std::vector<Block>& prev, const Block& own) const override {
    return objective_veh(*net_, m, prev.at(0), prev.at(2), own);
  }
  // One vehicle per trip.
  std::optional<Values> heuristic(const std::vector<Values>& prev) const override {
    const auto s = slots(*net_);
    const auto as = arcs(*net_);
    Values x(as.size(), 0.0);
    for (std::size_t i = 0; i < as.size(); ++i) {
      const int trip = as[i].from == kDepot ? as[i].to : as[i].to == kDepot ? as[i].from : -1;
      if (trip >= 0 && prev.at(0).at(s[trip].line_index) > 0.5) x[i] = 1.0;
    }
    return x;
  }
  double evaluate(const std::vector<Values>& blocks) const override {
    const auto& n = *net_;
    const auto plan = lin::to_plan(n.inst, blocks[0]);
    const auto tt = tim::to_timetable(n, blocks[0], blocks[2]);
    return evaluate_f4(n, rollout(n, plan, tt), to_schedule(n, blocks[3])).total();
  }

 private:
  std::shared_ptr<const ean::Network> net_;
};

// vehicle_id;trip_sequence;cost, with trips as period:line and the cost as JSON.
inline void write_csv(const ean::Network& n, const std::vector<Trip>& trips, const VehicleSchedule& vs,
                      const std::filesystem::path& file) {
  std::ofstream os(file);
  if (!os) throw IoError("cannot write " + file.string());
  std::map<std::pair<int, int>, const Trip*> by_key;
  for (const auto& t : trips) by_key[{t.period, t.line}] = &t;
  os << "vehicle_id;trip_sequence;cost\n";
  for (std::size_t v = 0; v < vs.vehicles.size(); ++v) {
    os << v + 1 << ';';
    for (std::size_t i = 0; i < vs.vehicles[v].size(); ++i)
      os << (i ? "," : "") << vs.vehicles[v][i].first << ':' << vs.vehicles[v][i].second;
    os << ';' << to_json(chain_cost(n, by_key, vs.vehicles[v])).dump() << '\n';
  }
}

}  // namespace transit::veh
