#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "transit/error.hpp"
#include "transit/framework/stage.hpp"
#include "transit/milp/solver.hpp"

namespace transit::framework {

using StageList = std::vector<std::shared_ptr<const Stage>>;

// λ_1..λ_n, nonnegative and not all zero.
class Weights {
 public:
  Weights() = default;
  explicit Weights(std::vector<double> lambda) : lambda_(std::move(lambda)) {
    bool positive = false;
    for (double l : lambda_) {
      if (!(l >= 0.0)) throw ModelError("weights must be nonnegative");
      positive = positive || l > 0.0;
    }
    if (!positive) throw ModelError("at least one weight must be positive");
  }
  double operator[](std::size_t i) const { return lambda_.at(i); }
  std::size_t size() const { return lambda_.size(); }
  const std::vector<double>& values() const { return lambda_; }

 private:
  std::vector<double> lambda_;
};

struct SolveRecord {
  int first = 0;  // 1-based stage range
  int last = 0;
  milp::SolveStatus status = milp::SolveStatus::Optimal;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  long nodes = 0;
  std::size_t vars = 0;
  std::size_t cons = 0;
};

struct StageResult {
  int index = 0;  // 1-based
  std::string name;
  Values values;
  double f = 0.0;
  std::string tag;  // "sequential", "integrated(k..l)" or "heuristic"
};

struct PipelineResult {
  std::vector<StageResult> stages;
  std::vector<double> weights;
  double total = 0.0;
  double int_objective = 0.0;  // objective of the Int_{k,l} sub-solve, if any
  std::vector<SolveRecord> solves;

  std::vector<Values> values() const {
    std::vector<Values> v;
    for (const auto& s : stages) v.push_back(s.values);
    return v;
  }
  double max_gap() const {
    double g = 0.0;
    for (const auto& s : solves) g = std::max(g, s.gap);
    return g;
  }
};

struct RunOptions {
  milp::SolveOptions solve;
  // Stages before k use Stage::heuristic when one is registered.
  bool heuristic_prefix = false;
  // Objective weights of the Int_{k,l} solve; defaults to the evaluation weights.
  std::optional<std::vector<double>> int_weights;
  // Known values for stages k..l used as a start for the integrated solve.
  std::optional<std::vector<Values>> start;
};

// Model for stages k..l (1-based) with stages 1..k-1 fixed to `prefix`.
struct Assembly {
  milp::MilpModel model;
  std::vector<Block> blocks;  // all stages 1..l
};

inline Assembly assemble(const StageList& stages, const std::vector<Values>& prefix, int k, int l,
                         const std::vector<double>& weights) {
  Assembly a;
  for (const auto& v : prefix) a.blocks.push_back(constant_block(v));
  milp::LinExpr obj;
  for (int i = k; i <= l; ++i) {
    const Stage& s = *stages[i - 1];
    a.model.set_block_tag(s.name());
    const std::size_t first_var = a.model.num_vars();
    Block own = s.declare(a.model);
    s.constrain(a.model, a.blocks, own);
    milp::LinExpr fi = s.objective(a.model, a.blocks, own);
    // Branch on later stages first.
    const int priority = static_cast<int>(l - i + 1);
    for (std::size_t v = first_var; v < a.model.num_vars(); ++v)
      a.model.set_branch_priority(milp::VarId{static_cast<std::uint32_t>(v)}, priority);
    const double w = weights.at(i - 1);
    if (w != 0.0) obj += fi * w;
    a.blocks.push_back(std::move(own));
  }
  a.model.set_objective(obj);
  a.model.freeze();
  return a;
}

namespace detail {

inline std::vector<double> start_assignment(const Assembly& a, const std::vector<Values>& start, int k) {
  // Fix the block variables and let the solver complete the auxiliaries.
  milp::MilpModel fixed = a.model.thawed();
  for (std::size_t s = 0; s < start.size(); ++s) {
    const Block& b = a.blocks.at(k - 1 + s);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto& terms = b[j].terms();
      if (terms.size() != 1 || terms[0].second != 1.0 || b[j].constant() != 0.0) continue;
      const double v = start[s].at(j);
      fixed.set_bounds(terms[0].first, v, v);
    }
  }
  fixed.freeze();
  milp::SolveOptions o;
  o.node_limit = 10000;
  milp::MilpSolution sol = milp::solve(fixed, o);
  return sol.has_solution() ? sol.assignment : std::vector<double>{};
}

}  // namespace detail

inline double weighted_total(const std::vector<StageResult>& stages, const std::vector<double>& w) {
  double t = 0.0;
  for (std::size_t i = 0; i < stages.size(); ++i) t += w.at(i) * stages[i].f;
  return t;
}

// Stages 1..k-1 sequentially, k..l jointly, l+1..n sequentially.
inline PipelineResult run_integrated(const StageList& stages, const Weights& weights, int k, int l,
                                     const RunOptions& opts = {}) {
  const int n = static_cast<int>(stages.size());
  if (weights.size() != stages.size()) throw ModelError("one weight per stage required");
  if (k < 1 || l < k || l > n) throw ModelError("invalid integration range");
  PipelineResult res;
  res.weights = weights.values();
  std::vector<Values> values;

  auto record = [&](int first, int last, const milp::MilpSolution& sol, const milp::MilpModel& m) {
    res.solves.push_back({first, last, sol.status, sol.objective, sol.bound, sol.gap, sol.node_count,
                          m.num_vars(), m.num_constraints()});
  };
  auto finish_stage = [&](int i, Values v, const std::string& tag) {
    values.push_back(std::move(v));
    StageResult sr;
    sr.index = i;
    sr.name = stages[i - 1]->name();
    sr.values = values.back();
    sr.f = stages[i - 1]->evaluate(values);
    sr.tag = tag;
    res.stages.push_back(std::move(sr));
  };
  auto solve_range = [&](int first, int last, const std::vector<double>& w,
                         const std::optional<std::vector<Values>>& start) {
    Assembly a = assemble(stages, values, first, last, w);
    milp::SolveOptions so = opts.solve;
    if (start) so.hint = detail::start_assignment(a, *start, first);
    milp::MilpSolution sol = milp::solve(a.model, so);
    record(first, last, sol, a.model);
    if (!sol.has_solution()) {
      if (sol.status == milp::SolveStatus::GapLimit)
        throw SolveLimit("no feasible point found for stages " + std::to_string(first) + ".." +
                         std::to_string(last) + " within the limits");
      if (first == last) throw StageInfeasible(first);
      throw IntegrationInfeasible(first, last);
    }
    const std::string tag = first == last ? "sequential"
                                          : "integrated(" + std::to_string(first) + ".." +
                                                std::to_string(last) + ")";
    for (int i = first; i <= last; ++i) finish_stage(i, block_values(a.blocks[i - 1], sol.assignment), tag);
    return sol.objective;
  };
  auto sequential_stage = [&](int i, bool allow_heuristic) {
    if (allow_heuristic) {
      if (auto h = stages[i - 1]->heuristic(values)) {
        finish_stage(i, std::move(*h), "heuristic");
        return;
      }
    }
    std::vector<double> unit(n, 0.0);
    unit[i - 1] = 1.0;
    std::optional<std::vector<Values>> start;
    if (auto h = stages[i - 1]->heuristic(values)) start = std::vector<Values>{std::move(*h)};
    solve_range(i, i, unit, start);
  };

  for (int i = 1; i < k; ++i) sequential_stage(i, opts.heuristic_prefix);
  if (k == l) {
    sequential_stage(k, false);
    res.int_objective = res.stages.back().f * weights[k - 1];
  } else {
    const std::vector<double> w = opts.int_weights.value_or(weights.values());
    res.int_objective = solve_range(k, l, w, opts.start);
  }
  for (int i = l + 1; i <= n; ++i) sequential_stage(i, false);
  res.total = weighted_total(res.stages, res.weights);
  return res;
}

inline PipelineResult run_sequential(const StageList& stages, const Weights& weights,
                                     const RunOptions& opts = {}) {
  PipelineResult r = run_integrated(stages, weights, 1, 1, opts);
  return r;
}

inline nlohmann::json to_json(const PipelineResult& r) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"i", s.index}, {"name", s.name}, {"f_i", s.f}, {"tag", s.tag}});
  return {{"stages", stages}, {"total", r.total}, {"weights", r.weights}};
}

}  // namespace transit::framework
