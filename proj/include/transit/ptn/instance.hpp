#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "transit/error.hpp"

namespace transit::ptn {

// Times are integer minutes, lengths are kilometres.

struct Stop {
  int id = 0;
  std::string name;
  int L_wait = 0, U_wait = 0;
  int L_trans = 0, U_trans = 0;
  bool operator==(const Stop&) const = default;
};

struct Edge {
  int id = 0;
  int u = 0, v = 0;  // stop ids
  double length = 0.0;
  int L_drive = 0, U_drive = 0;
  int f_min = 0, f_max = 0;
  bool operator==(const Edge&) const = default;
};

struct Line {
  int id = 0;
  std::vector<int> edges;  // edge ids in travel order
  double cost = 0.0;
  // Filled by finalize_lines().
  std::vector<int> stops;  // stop ids in travel order
  double length = 0.0;

  int first_stop() const { return stops.front(); }
  int last_stop() const { return stops.back(); }
  bool operator==(const Line&) const = default;
};

// Empty-vehicle connection: minimum time and distance.
struct Deadhead {
  int time = 0;
  double distance = 0.0;
  bool operator==(const Deadhead&) const = default;
};

struct Params {
  int T = 10;
  std::vector<int> periods{0, 1};  // sorted, unique
  std::array<double, 5> gamma{1, 1, 1, 1, 100};
  double lambda1 = 0.0, lambda3 = 1.0, lambda4 = 1.0;
  std::optional<int> depot_stop;  // lowest stop id when absent
  int min_turnaround = 1;
  std::optional<double> big_M, big_M_prime;
  double transfer_penalty = 0.0;  // added to L_a of transfers when routing
  bool operator==(const Params&) const = default;
};

struct PtnInstance {
  std::string name;
  std::vector<Stop> stops;
  std::vector<Edge> edges;
  std::map<std::pair<int, int>, double> od;  // (u, v) -> C_{u,v}
  std::vector<Line> pool;
  Params params;
  // Line ids; only explicitly known values, see derive_turnarounds.
  std::map<std::pair<int, int>, Deadhead> turnaround;
  std::map<int, Deadhead> depot_out;  // depot -> first stop of l
  std::map<int, Deadhead> depot_in;   // last stop of l -> depot

  bool operator==(const PtnInstance&) const = default;

  std::size_t stop_pos(int id) const { return find(stops, id, "stop"); }
  std::size_t edge_pos(int id) const { return find(edges, id, "edge"); }
  std::size_t line_pos(int id) const { return find(pool, id, "line"); }
  const Stop& stop(int id) const { return stops[stop_pos(id)]; }
  const Edge& edge(int id) const { return edges[edge_pos(id)]; }
  const Line& line(int id) const { return pool[line_pos(id)]; }

  int depot() const {
    if (params.depot_stop) return *params.depot_stop;
    int best = stops.front().id;
    for (const auto& s : stops) best = std::min(best, s.id);
    return best;
  }

  // OD pairs with positive demand, in (u, v) order.
  std::vector<std::pair<std::pair<int, int>, double>> demands() const {
    std::vector<std::pair<std::pair<int, int>, double>> out;
    for (const auto& [uv, c] : od)
      if (c > 0.0) out.emplace_back(uv, c);
    return out;
  }

 private:
  template <class T>
  static std::size_t find(const std::vector<T>& v, int id, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i].id == id) return i;
    throw ValidationError(std::string("unknown ") + what + " id " + std::to_string(id));
  }
};

// Computes stop sequences and lengths of the pool lines from their edge paths.
// A line may traverse an edge against its (u, v) orientation.
inline void finalize_lines(PtnInstance& inst) {
  for (auto& l : inst.pool) {
    const std::string tag = "line " + std::to_string(l.id);
    if (l.edges.empty()) throw ValidationError(tag + " has no edges");
    std::vector<const Edge*> es;
    for (int e : l.edges) {
      auto it = std::find_if(inst.edges.begin(), inst.edges.end(), [&](const Edge& x) { return x.id == e; });
      if (it == inst.edges.end()) throw ValidationError(tag + " references unknown edge " + std::to_string(e));
      es.push_back(&*it);
    }
    int start = es[0]->u;
    if (es.size() > 1 && (es[0]->u == es[1]->u || es[0]->u == es[1]->v)) start = es[0]->v;
    l.stops = {start};
    l.length = 0.0;
    for (const Edge* e : es) {
      const int at = l.stops.back();
      if (e->u == at) l.stops.push_back(e->v);
      else if (e->v == at) l.stops.push_back(e->u);
      else throw ValidationError(tag + ": edge " + std::to_string(e->id) + " does not continue the path");
      l.length += e->length;
    }
    std::set<int> seen(l.stops.begin(), l.stops.end());
    if (seen.size() != l.stops.size()) throw ValidationError(tag + " is not a simple path");
  }
}

inline void validate(const PtnInstance& inst) {
  auto fail = [](const std::string& m) { throw ValidationError(m); };
  auto bounds = [&](int lo, int hi, const std::string& what) {
    if (lo < 0 || lo > hi) fail(what + ": need 0 <= L <= U");
  };
  if (inst.stops.empty()) fail("instance has no stops");
  std::set<int> ids;
  for (const auto& s : inst.stops) {
    if (!ids.insert(s.id).second) fail("duplicate stop id " + std::to_string(s.id));
    bounds(s.L_wait, s.U_wait, "stop " + std::to_string(s.id) + " wait");
    bounds(s.L_trans, s.U_trans, "stop " + std::to_string(s.id) + " transfer");
  }
  std::set<int> eids;
  for (const auto& e : inst.edges) {
    const std::string tag = "edge " + std::to_string(e.id);
    if (!eids.insert(e.id).second) fail("duplicate " + tag);
    if (!ids.count(e.u) || !ids.count(e.v)) fail(tag + " references an unknown stop");
    if (e.u == e.v) fail(tag + " is a loop");
    if (!(e.length >= 0.0)) fail(tag + " has negative length");
    bounds(e.L_drive, e.U_drive, tag + " drive");
    if (e.f_min < 0 || e.f_min > e.f_max) fail(tag + ": need 0 <= f_min <= f_max");
  }
  for (const auto& [uv, c] : inst.od) {
    if (!ids.count(uv.first) || !ids.count(uv.second)) fail("demand references an unknown stop");
    if (!(c >= 0.0)) fail("negative demand");
    if (c > 0.0 && uv.first == uv.second) fail("positive demand needs distinct stops");
  }
  PtnInstance check = inst;
  finalize_lines(check);
  std::set<int> lids;
  for (std::size_t i = 0; i < inst.pool.size(); ++i) {
    const Line& l = inst.pool[i];
    if (!lids.insert(l.id).second) fail("duplicate line id " + std::to_string(l.id));
    if (!(l.cost >= 0.0)) fail("line " + std::to_string(l.id) + " has negative cost");
    if (l.stops != check.pool[i].stops || l.length != check.pool[i].length)
      fail("line " + std::to_string(l.id) + ": stop sequence inconsistent with edge path");
  }
  const Params& p = inst.params;
  if (p.T < 2) fail("period T must be at least 2");
  if (p.periods.empty()) fail("period set is empty");
  if (!std::is_sorted(p.periods.begin(), p.periods.end()) ||
      std::adjacent_find(p.periods.begin(), p.periods.end()) != p.periods.end())
    fail("periods must be sorted and unique");
  for (double g : p.gamma)
    if (!(g >= 0.0)) fail("gamma must be nonnegative");
  if (!(p.lambda1 >= 0.0 && p.lambda3 >= 0.0 && p.lambda4 >= 0.0)) fail("lambda must be nonnegative");
  if (p.depot_stop && !ids.count(*p.depot_stop)) fail("depot stop is unknown");
  if (p.min_turnaround < 0) fail("minimum turnaround must be nonnegative");
  if (p.big_M && !(*p.big_M >= 0.0)) fail("big_M must be nonnegative");
  if (p.big_M_prime && !(*p.big_M_prime >= 0.0)) fail("big_M_prime must be nonnegative");
  if (!(p.transfer_penalty >= 0.0)) fail("transfer penalty must be nonnegative");
  auto dead = [&](const Deadhead& d, const std::string& what) {
    if (d.time < 0 || !(d.distance >= 0.0)) fail(what + ": deadhead must be nonnegative");
  };
  for (const auto& [k, d] : inst.turnaround) {
    if (!lids.count(k.first) || !lids.count(k.second)) fail("turnaround references an unknown line");
    dead(d, "turnaround");
  }
  for (const auto* m : {&inst.depot_out, &inst.depot_in})
    for (const auto& [l, d] : *m) {
      if (!lids.count(l)) fail("depot deadhead references an unknown line");
      dead(d, "depot deadhead");
    }
}

}  // namespace transit::ptn
