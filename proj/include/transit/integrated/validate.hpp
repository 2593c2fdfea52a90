#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "transit/ean/network.hpp"
#include "transit/lin/lin.hpp"
#include "transit/pass/pass.hpp"
#include "transit/tim/tim.hpp"
#include "transit/veh/veh.hpp"

// Checks written against the problem definitions only; they do not reuse the
// model builders. Each returns the list of violations found.

namespace transit::integrated {

inline std::vector<std::string> check_plan(const ptn::PtnInstance& inst, const lin::LinePlan& plan) {
  std::vector<std::string> v;
  for (const auto& e : inst.edges) {
    int f = 0;
    for (const auto& l : inst.pool) {
      const auto it = plan.chosen.find(l.id);
      if (it == plan.chosen.end()) {
        v.push_back("line " + std::to_string(l.id) + " missing from plan");
        continue;
      }
      for (int x : l.edges) f += (x == e.id) * it->second;
    }
    if (f < e.f_min || f > e.f_max)
      v.push_back("edge " + std::to_string(e.id) + " frequency " + std::to_string(f) + " outside bounds");
  }
  return v;
}

inline std::vector<std::string> check_routing(const ean::Network& n, const lin::LinePlan& plan,
                                              const pass::RoutingResult& r) {
  std::vector<std::string> v;
  const auto chosen = plan.lines();
  std::set<std::pair<int, int>> seen;
  for (const auto& route : r.routes) {
    const std::string tag = "route " + std::to_string(route.u) + "->" + std::to_string(route.v);
    seen.insert({route.u, route.v});
    int at = n.net.source(route.u);
    std::set<int> visited{at};
    for (int id : route.activities) {
      const auto& a = n.net.activities.at(static_cast<std::size_t>(id));
      if (a.tail != at) v.push_back(tag + ": activity " + std::to_string(id) + " does not continue the path");
      for (int l : {a.line1, a.line2})
        if (l != ean::kNoLine && !chosen.count(l)) v.push_back(tag + ": uses unchosen line " + std::to_string(l));
      at = a.head;
      if (!visited.insert(at).second) v.push_back(tag + ": revisits an event");
    }
    if (at != n.net.target(route.v)) v.push_back(tag + ": does not end at the target");
  }
  for (const auto& [uv, c] : n.od)
    if (!seen.count(uv)) v.push_back("OD pair without route");
  return v;
}

inline std::vector<std::string> check_timetable(const ean::Network& n, const lin::LinePlan& plan,
                                                const tim::Timetable& tt) {
  std::vector<std::string> v;
  const int T = n.inst.params.T;
  for (const auto& [e, pi] : tt.pi)
    if (pi < 0 || pi >= T) v.push_back("event " + std::to_string(e) + " time outside [0, T)");
  for (std::size_t a = 0; a < n.base_activities; ++a) {
    const auto& act = n.net.activities[a];
    const std::string tag = "activity " + std::to_string(act.id);
    const int head = tt.pi.at(n.net.events[act.head].id), tail = tt.pi.at(n.net.events[act.tail].id);
    const int dur = tt.duration.at(act.id);
    if (dur != head - tail + tt.z.at(act.id) * T) v.push_back(tag + ": duration inconsistent with pi and z");
    int active = plan.chosen.at(act.line1);
    if (act.line2 != ean::kNoLine) active *= plan.chosen.at(act.line2);
    if (tt.eta.at(act.id) != active) v.push_back(tag + ": activation differs from the line plan");
    if (active && (dur < act.L || dur > act.U)) v.push_back(tag + ": duration outside [L, U]");
  }
  return v;
}

inline std::vector<std::string> check_schedule(const ean::Network& n, const std::vector<veh::Trip>& trips,
                                               const veh::VehicleSchedule& vs) {
  std::vector<std::string> v;
  std::map<std::pair<int, int>, const veh::Trip*> by_key;
  for (const auto& t : trips) by_key[{t.period, t.line}] = &t;
  std::map<std::pair<int, int>, int> served;
  for (const auto& chain : vs.vehicles) {
    if (chain.empty()) v.push_back("empty vehicle");
    const veh::Trip* prev = nullptr;
    for (const auto& k : chain) {
      ++served[k];
      auto it = by_key.find(k);
      if (it == by_key.end()) {
        v.push_back("vehicle serves a trip that is not operated");
        prev = nullptr;
        continue;
      }
      if (prev && it->second->alpha - prev->omega < n.inst.turnaround.at({prev->line, k.second}).time)
        v.push_back("turnaround violated before trip " + std::to_string(k.first) + ":" + std::to_string(k.second));
      prev = it->second;
    }
  }
  for (const auto& [k, t] : by_key)
    if (served[k] != 1) v.push_back("trip " + std::to_string(k.first) + ":" + std::to_string(k.second) + " not served once");
  return v;
}

}  // namespace transit::integrated
