#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "transit/ean/network.hpp"
#include "transit/error.hpp"
#include "transit/framework/pipeline.hpp"
#include "transit/lin/lin.hpp"
#include "transit/pass/pass.hpp"
#include "transit/ptn/io.hpp"
#include "transit/tim/tim.hpp"
#include "transit/veh/veh.hpp"

namespace transit::integrated {

enum class Approach { Seq, TimPass, LinTimPass, TimVeh, Full };

inline const char* to_string(Approach a) {
  switch (a) {
    case Approach::Seq: return "seq";
    case Approach::TimPass: return "timpass";
    case Approach::LinTimPass: return "lintimpass";
    case Approach::TimVeh: return "timveh";
    case Approach::Full: return "full";
  }
  return "?";
}

inline std::optional<Approach> parse_approach(const std::string& s) {
  for (Approach a : {Approach::Seq, Approach::TimPass, Approach::LinTimPass, Approach::TimVeh, Approach::Full})
    if (s == to_string(a)) return a;
  return std::nullopt;
}

inline const std::vector<Approach>& all_approaches() {
  static const std::vector<Approach> v{Approach::Seq, Approach::TimPass, Approach::LinTimPass, Approach::TimVeh,
                                       Approach::Full};
  return v;
}

struct Lambda {
  double l1 = 0.0, l3 = 1.0, l4 = 1.0;

  static Lambda from(const ptn::PtnInstance& inst) {
    return {inst.params.lambda1, inst.params.lambda3, inst.params.lambda4};
  }
  void check() const {
    if (!(l1 >= 0.0 && l3 >= 0.0 && l4 >= 0.0)) throw ModelError("lambda must be nonnegative");
    if (l3 == 0.0 && l4 == 0.0) throw ModelError("lambda_3 and lambda_4 must not both be zero");
  }
};

// Stage order: lin, pass, tim, veh.
inline framework::StageList transport_stages(const std::shared_ptr<const ean::Network>& net) {
  return {std::make_shared<lin::LinStage>(net), std::make_shared<pass::PassStage>(net),
          std::make_shared<tim::TimStage>(net), std::make_shared<veh::VehStage>(net)};
}

struct ApproachOptions {
  milp::SolveOptions solve;
  // Seed the integrated solve with the sequential solution.
  bool warm_start = true;
};

struct PlanReport {
  std::string instance;
  std::string approach;
  int k = 1, l = 1;  // integrated stage range
  Lambda lambda;
  lin::LinePlan plan;
  pass::RoutingResult routing;
  tim::Timetable timetable;
  std::vector<veh::Trip> trips;
  veh::VehicleSchedule schedule;
  veh::CostBreakdown cost;
  double f1 = 0, f2 = 0, f3 = 0, f4 = 0;
  double total = 0;
  std::optional<double> pos;  // against `reference`
  std::optional<double> reference;
  double reference_gap = 0.0;
  bool dominated = false;
  framework::PipelineResult pipeline;

  double gap() const { return pipeline.max_gap(); }
};

// Recomputes f1..f4 from the stage artifacts.
inline void evaluate(const ean::Network& n, const std::vector<framework::Values>& v, PlanReport& r) {
  r.plan = lin::to_plan(n.inst, v.at(0));
  r.routing = pass::to_routing(n, v.at(1));
  r.timetable = tim::to_timetable(n, v.at(0), v.at(2));
  r.trips = veh::rollout(n, r.plan, r.timetable);
  r.schedule = veh::to_schedule(n, v.at(3));
  r.cost = veh::evaluate_f4(n, r.trips, r.schedule);
  r.f1 = r.plan.cost;
  r.f2 = r.routing.f2;
  r.f3 = tim::evaluate_f3(n, r.routing, r.timetable);
  r.f4 = r.cost.total();
  r.total = r.lambda.l3 * r.f3 + r.lambda.l4 * r.f4;
}

// Stages k..l integrated, the rest sequential. The integrated objective is
// lambda_3 f_3 + lambda_4 f_4 over the stages in range; `with_lambda1` adds
// lambda_1 f_1 when line planning is in range.
inline PlanReport run_range(const std::shared_ptr<const ean::Network>& net, int k, int l, const Lambda& lambda,
                            const ApproachOptions& opts = {}, bool with_lambda1 = false) {
  lambda.check();
  const auto stages = transport_stages(net);
  const framework::Weights eval({0.0, 0.0, lambda.l3, lambda.l4});
  framework::RunOptions ro;
  ro.solve = opts.solve;
  std::vector<double> w{with_lambda1 ? lambda.l1 : 0.0, 0.0, lambda.l3, lambda.l4};
  ro.int_weights = w;
  if (opts.warm_start && k < l) {
    framework::RunOptions seq_opts;
    seq_opts.solve = opts.solve;
    const auto seq = framework::run_sequential(stages, eval, seq_opts);
    std::vector<framework::Values> start;
    for (int i = k; i <= l; ++i) start.push_back(seq.stages[i - 1].values);
    ro.start = start;
  }
  PlanReport r;
  r.instance = net->inst.name;
  r.k = k;
  r.l = l;
  r.lambda = lambda;
  r.pipeline = framework::run_integrated(stages, eval, k, l, ro);
  evaluate(*net, r.pipeline.values(), r);
  return r;
}

inline PlanReport run_approach(const std::shared_ptr<const ean::Network>& net, Approach a, const Lambda& lambda,
                               const ApproachOptions& opts = {}) {
  PlanReport r;
  switch (a) {
    case Approach::Seq: r = run_range(net, 1, 1, lambda, opts); break;
    case Approach::TimPass: r = run_range(net, 2, 3, lambda, opts); break;
    case Approach::LinTimPass: r = run_range(net, 1, 3, lambda, opts, true); break;
    case Approach::TimVeh: r = run_range(net, 3, 4, lambda, opts); break;
    case Approach::Full: r = run_range(net, 1, 4, lambda, opts); break;
  }
  r.approach = to_string(a);
  return r;
}

// PoS of `r` against the objective of a reference integrated solution.
inline void attach_pos(PlanReport& r, const PlanReport& reference) {
  r.reference = reference.total;
  r.reference_gap = reference.gap();
  if (reference.total > 0.0) r.pos = (r.total - reference.total) / reference.total;
}

// One report per (approach, lambda); points dominated in (f3, f4) are flagged.
inline std::vector<PlanReport> pareto_sweep(const std::shared_ptr<const ean::Network>& net,
                                            const std::vector<Lambda>& lambdas,
                                            const std::vector<Approach>& approaches = {Approach::Full},
                                            const ApproachOptions& opts = {}) {
  std::vector<PlanReport> out;
  for (const auto& lam : lambdas)
    for (Approach a : approaches) out.push_back(run_approach(net, a, lam, opts));
  const double eps = 1e-9;
  for (auto& r : out)
    for (const auto& s : out)
      if (s.f3 <= r.f3 + eps && s.f4 <= r.f4 + eps && (s.f3 < r.f3 - eps || s.f4 < r.f4 - eps)) r.dominated = true;
  return out;
}

inline nlohmann::json to_json(const PlanReport& r) {
  using nlohmann::json;
  json plan = json::array();
  for (const auto& [l, y] : r.plan.chosen) plan.push_back({{"line", l}, {"chosen", y}});
  json routes = json::array();
  for (const auto& x : r.routing.routes)
    routes.push_back({{"u", x.u}, {"v", x.v}, {"demand", x.demand}, {"activities", x.activities}, {"length", x.length}});
  json pi = json::object(), acts = json::array();
  for (const auto& [e, v] : r.timetable.pi) pi[std::to_string(e)] = v;
  for (const auto& [a, z] : r.timetable.z)
    acts.push_back({{"id", a}, {"z", z}, {"eta", r.timetable.eta.at(a)}, {"duration", r.timetable.duration.at(a)}});
  json trips = json::array();
  for (const auto& t : r.trips)
    trips.push_back({{"period", t.period}, {"line", t.line}, {"alpha", t.alpha}, {"omega", t.omega}, {"delta", t.delta}});
  json vehicles = json::array();
  for (const auto& chain : r.schedule.vehicles) {
    json c = json::array();
    for (const auto& [t, l] : chain) c.push_back({{"period", t}, {"line", l}});
    vehicles.push_back(c);
  }
  json solves = json::array();
  for (const auto& s : r.pipeline.solves)
    solves.push_back({{"stages", std::to_string(s.first) + ".." + std::to_string(s.last)},
                      {"status", milp::to_string(s.status)},
                      {"objective", s.objective},
                      {"bound", s.bound},
                      {"gap", s.gap},
                      {"nodes", s.nodes},
                      {"variables", s.vars},
                      {"constraints", s.cons}});
  json j = {{"instance", r.instance},
            {"approach", r.approach},
            {"integrated_stages", {r.k, r.l}},
            {"lambda", {{"lambda1", r.lambda.l1}, {"lambda3", r.lambda.l3}, {"lambda4", r.lambda.l4}}},
            {"objectives", {{"f1", r.f1}, {"f2", r.f2}, {"f3", r.f3}, {"f4", r.f4}, {"total", r.total}}},
            {"pipeline", framework::to_json(r.pipeline)},
            {"line_plan", plan},
            {"routes", routes},
            {"timetable", {{"pi", pi}, {"activities", acts}}},
            {"trips", trips},
            {"vehicles", vehicles},
            {"vehicle_cost", veh::to_json(r.cost)},
            {"solver", solves},
            {"gap", r.gap()},
            {"dominated", r.dominated}};
  if (r.pos) j["pos"] = *r.pos;
  if (r.reference) {
    j["reference_total"] = *r.reference;
    j["reference_gap"] = r.reference_gap;
  }
  return j;
}

inline void write_sweep_csv(const std::vector<PlanReport>& reports, const std::filesystem::path& file) {
  std::ofstream os(file);
  if (!os) throw IoError("cannot write " + file.string());
  os << "approach;lambda1;lambda3;lambda4;f1;f2;f3;f4;total;pos;gap\n";
  using ptn::csv::num;
  for (const auto& r : reports) {
    os << r.approach << ';' << num(r.lambda.l1) << ';' << num(r.lambda.l3) << ';' << num(r.lambda.l4) << ';'
       << num(r.f1) << ';' << num(r.f2) << ';' << num(r.f3) << ';' << num(r.f4) << ';' << num(r.total) << ';';
    if (r.pos) os << num(*r.pos);
    os << ';' << num(r.gap()) << '\n';
  }
}

}  // namespace transit::integrated
