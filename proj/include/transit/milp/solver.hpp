#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "transit/error.hpp"
#include "transit/milp/lp.hpp"
#include "transit/milp/model.hpp"
#include "transit/milp/primal_simplex.hpp"

namespace transit::milp {

struct SolveOptions {
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  double gap_tol = 1e-9;                                        // absolute
  long node_limit = std::numeric_limits<long>::max();
  std::vector<double> hint;  // optional start, indexed by VarId::index
};

inline constexpr double kIntegralityTol = 1e-6;
inline constexpr double kFeasibilityTol = 1e-6;

namespace detail {

inline double relative_gap(double objective, double bound) {
  return std::max(0.0, objective - bound) / std::max(1.0, std::abs(objective));
}

// True when every feasible point has an integral objective value.
inline bool integral_objective(const LpProblem& lp) {
  auto integral = [](double v) { return std::abs(v - std::round(v)) < 1e-12; };
  if (!integral(lp.cost_constant)) return false;
  for (int j = 0; j < lp.num_cols(); ++j) {
    if (lp.cost[j] == 0.0) continue;
    if (!lp.integer[j] || !integral(lp.cost[j])) return false;
  }
  return true;
}

// Fixes the integer columns at `x` and re-solves for the continuous ones.
// Returns the full model assignment, or nothing if that point is infeasible.
inline std::optional<std::vector<double>> polish(const MilpModel& model, const Reduction& red,
                                                 std::vector<double> cols) {
  const LpProblem& lp = red.lp;
  bool has_continuous = false;
  LpProblem fixed = lp;
  for (int j = 0; j < lp.num_cols(); ++j) {
    if (lp.integer[j]) {
      const double v = std::round(cols[j]);
      if (v < lp.lo[j] - 1e-9 || v > lp.hi[j] + 1e-9) return std::nullopt;
      fixed.lo[j] = fixed.hi[j] = cols[j] = v;
    } else {
      has_continuous = true;
    }
  }
  if (has_continuous) {
    DualSimplex lp_fixed(fixed);
    if (lp_fixed.solve() != LpStatus::Optimal) return std::nullopt;
    for (int j = 0; j < lp.num_cols(); ++j)
      if (!lp.integer[j]) cols[j] = std::clamp(lp_fixed.value(j), lp.lo[j], lp.hi[j]);
  }
  std::vector<double> x = red.expand(cols);
  for (std::size_t v = 0; v < x.size(); ++v)
    if (model.vars()[v].is_integral()) x[v] = std::round(x[v]);
  if (max_violation(model, x) > kFeasibilityTol) return std::nullopt;
  return x;
}

inline MilpSolution finish(const MilpModel& model, std::vector<double> x, SolveStatus status,
                           double bound, long nodes, long iterations) {
  MilpSolution s;
  s.status = status;
  s.objective = model.objective().evaluate(x);
  s.assignment = std::move(x);
  s.bound = std::min(bound, s.objective);
  s.gap = status == SolveStatus::Optimal ? 0.0 : relative_gap(s.objective, s.bound);
  s.node_count = nodes;
  s.lp_iterations = iterations;
  return s;
}

}  // namespace detail

// Linear relaxation: integrality dropped, solved by the bounded dual simplex.
inline MilpSolution lp_relaxation(const MilpModel& model) {
  Reduction red = reduce(model, /*relax=*/true);
  MilpSolution s;
  if (red.infeasible) return s;
  DualSimplex lp(red.lp);
  const LpStatus st = lp.solve();
  s.lp_iterations = lp.iterations();
  if (st == LpStatus::IterationLimit) throw Error("LP iteration limit reached");
  if (st == LpStatus::Infeasible) return s;
  s.status = SolveStatus::Optimal;
  s.assignment = red.expand(lp.primal());
  s.objective = model.objective().evaluate(s.assignment);
  s.bound = s.objective;
  s.node_count = 1;
  return s;
}

// Branch and bound: depth-first until an incumbent exists, then best-bound
// with plunging.
// Nodes are kept as (parent, one bound change) so the open set stays small;
// each node re-optimizes the shared dual simplex from the basis left by the
// previous node.
inline MilpSolution solve(const MilpModel& model, const SolveOptions& opts = {}) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  Reduction red = reduce(model, /*relax=*/false);
  MilpSolution none;
  if (red.infeasible) return none;
  const LpProblem& lp = red.lp;
  const int n = lp.num_cols();
  const bool int_obj = detail::integral_objective(lp);

  std::vector<double> incumbent;
  double inc_obj = kInf;
  auto offer = [&](const std::vector<double>& cols) {
    auto x = detail::polish(model, red, cols);
    if (!x) return;
    const double obj = model.objective().evaluate(*x);
    if (obj < inc_obj - 1e-9) {
      inc_obj = obj;
      incumbent = std::move(*x);
    }
  };
  if (!opts.hint.empty() && opts.hint.size() == model.num_vars()) {
    std::vector<double> cols(n);
    for (int j = 0; j < n; ++j) cols[j] = opts.hint[red.var_of_col[j]];
    offer(cols);
  }

  struct Node {
    int parent;
    int col;
    double lo, hi;
    double bound;
    int depth;
  };
  std::vector<Node> nodes;
  auto best_first = [&nodes](int a, int b) {
    const Node& x = nodes[a];
    const Node& y = nodes[b];
    if (x.bound != y.bound) return x.bound < y.bound;
    if (x.depth != y.depth) return x.depth > y.depth;
    return a < b;
  };
  // Until the first incumbent: deepest, most recent node first.
  auto dive_first = [&nodes](int a, int b) {
    if (nodes[a].depth != nodes[b].depth) return nodes[a].depth > nodes[b].depth;
    return a > b;
  };
  std::set<int, decltype(best_first)> open(best_first);
  std::set<int, decltype(dive_first)> dive(dive_first);
  auto push = [&](const Node& nd) {
    nodes.push_back(nd);
    open.insert(static_cast<int>(nodes.size()) - 1);
    dive.insert(static_cast<int>(nodes.size()) - 1);
  };
  push({-1, -1, 0.0, 0.0, -kInf, 0});

  std::vector<int> priority(n);
  for (int j = 0; j < n; ++j) priority[j] = model.branch_priority(VarId{static_cast<std::uint32_t>(red.var_of_col[j])});

  DualSimplex simplex(lp);
  std::vector<double> lo(n), hi(n);
  long processed = 0;
  int next = -1;  // child created last
  bool limit_hit = false;

  auto prunable = [&](double bound) {
    if (!std::isfinite(inc_obj)) return false;
    if (int_obj) return std::ceil(bound - kIntegralityTol) >= inc_obj - 0.5;
    return bound >= inc_obj - opts.gap_tol;
  };

  while (!open.empty()) {
    const int best = *open.begin();
    if (prunable(nodes[best].bound)) {
      open.clear();
      break;
    }
    if (processed >= opts.node_limit ||
        std::chrono::duration<double>(Clock::now() - start).count() > opts.time_limit) {
      limit_hit = true;
      break;
    }
    // With an incumbent, keep plunging into the last child while its bound is
    // within half the gap of the best bound; the warm basis stays close.
    int id = std::isfinite(inc_obj) ? best : *dive.begin();
    if (std::isfinite(inc_obj) && next >= 0 && open.count(next) &&
        nodes[next].bound <= nodes[best].bound + 0.5 * (inc_obj - nodes[best].bound))
      id = next;
    next = -1;
    open.erase(id);
    dive.erase(id);
    ++processed;

    lo = lp.lo;
    hi = lp.hi;
    for (int k = id; k > 0; k = nodes[k].parent) {
      const Node& nd = nodes[k];
      lo[nd.col] = std::max(lo[nd.col], nd.lo);
      hi[nd.col] = std::min(hi[nd.col], nd.hi);
    }
    for (int j = 0; j < n; ++j) simplex.set_bounds(j, lo[j], hi[j]);
    const LpStatus st = simplex.solve();
    if (st == LpStatus::IterationLimit) throw Error("LP iteration limit reached");
    if (st == LpStatus::Infeasible) continue;
    const double obj = simplex.objective();
    if (prunable(obj)) continue;

    // Lowest priority class first, then most fractional, then lowest column.
    int branch = -1;
    double best_score = kInf;
    for (int j = 0; j < n; ++j) {
      if (!lp.integer[j]) continue;
      const double v = simplex.value(j);
      const double frac = v - std::floor(v);
      if (frac < kIntegralityTol || frac > 1.0 - kIntegralityTol) continue;
      const double score = priority[j] * 2.0 + std::abs(frac - 0.5);
      if (score < best_score - 1e-12) {
        best_score = score;
        branch = j;
      }
    }
    if (branch < 0) {
      offer(simplex.primal());
      continue;
    }
    const double v = simplex.value(branch);
    const int depth = nodes[id].depth + 1;
    const Node down{id, branch, lo[branch], std::floor(v), obj, depth};
    const Node up{id, branch, std::ceil(v), hi[branch], obj, depth};
    // The child in the rounding direction is created last, so a dive takes it first.
    if (v - std::floor(v) >= 0.5) {
      push(down);
      push(up);
    } else {
      push(up);
      push(down);
    }
    next = static_cast<int>(nodes.size()) - 1;
  }

  if (!std::isfinite(inc_obj)) {
    none.status = limit_hit ? SolveStatus::GapLimit : SolveStatus::Infeasible;
    none.bound = open.empty() ? kInf : nodes[*open.begin()].bound;
    none.node_count = processed;
    none.lp_iterations = simplex.iterations();
    return none;
  }
  if (!limit_hit)
    return detail::finish(model, std::move(incumbent), SolveStatus::Optimal, inc_obj, processed,
                          simplex.iterations());
  double bound = nodes[*open.begin()].bound;
  if (int_obj) bound = std::ceil(bound - kIntegralityTol);
  const SolveStatus st = bound >= inc_obj - opts.gap_tol ? SolveStatus::Optimal : SolveStatus::GapLimit;
  return detail::finish(model, std::move(incumbent), st, bound, processed, simplex.iterations());
}

// Exhaustive oracle: every integer assignment, continuous remainder by the
// independent primal simplex. Ties keep the lexicographically first point.
inline MilpSolution solve_bruteforce(const MilpModel& model, double max_points = 1e7) {
  const std::size_t nv = model.num_vars();
  std::vector<std::size_t> ints;
  double points = 1.0;
  for (std::size_t j = 0; j < nv; ++j) {
    const auto& d = model.vars()[j];
    if (!d.is_integral()) continue;
    ints.push_back(j);
    const double size = std::floor(d.hi + 1e-9) - std::ceil(d.lo - 1e-9) + 1.0;
    points *= std::max(size, 0.0);
  }
  if (points > max_points) throw TooLarge("integer domain has " + std::to_string(points) + " points");
  MilpSolution best;
  if (points == 0.0 || !model.trivially_infeasible().empty()) return best;

  std::vector<int> col_of(nv, -1);
  std::vector<std::size_t> conts;
  for (std::size_t j = 0; j < nv; ++j)
    if (!model.vars()[j].is_integral()) col_of[j] = static_cast<int>(conts.size()), conts.push_back(j);

  std::vector<double> x(nv, 0.0);
  for (std::size_t k : ints) x[k] = std::ceil(model.vars()[k].lo - 1e-9);
  double best_obj = std::numeric_limits<double>::infinity();
  long count = 0;
  while (true) {
    ++count;
    bool ok = true;
    if (conts.empty()) {
      if (max_violation(model, x) > kFeasibilityTol) ok = false;
    } else {
      LpProblem lp;
      for (std::size_t j : conts) {
        lp.lo.push_back(model.vars()[j].lo);
        lp.hi.push_back(model.vars()[j].hi);
        lp.cost.push_back(0.0);
        lp.integer.push_back(0);
      }
      for (const auto& [v, a] : model.objective().terms())
        if (col_of[v.index] >= 0) lp.cost[col_of[v.index]] += a;
      for (const auto& c : model.constraints()) {
        LpRow row;
        row.sense = c.sense;
        row.rhs = c.rhs;
        for (const auto& [v, a] : c.expr.terms()) {
          if (col_of[v.index] >= 0)
            row.coefs.emplace_back(col_of[v.index], a);
          else
            row.rhs -= a * x[v.index];
        }
        lp.rows.push_back(std::move(row));
      }
      PrimalResult r = primal_simplex(lp);
      if (r.status == LpStatus::IterationLimit) throw Error("oracle LP iteration limit reached");
      if (r.status != LpStatus::Optimal) {
        ok = false;
      } else {
        for (std::size_t c = 0; c < conts.size(); ++c) x[conts[c]] = r.x[c];
      }
    }
    if (ok) {
      const double obj = model.objective().evaluate(x);
      if (obj < best_obj - 1e-9) {
        best_obj = obj;
        best.assignment = x;
      }
    }
    // Odometer over integer variables, last variable fastest.
    std::size_t k = ints.size();
    while (k > 0) {
      const std::size_t v = ints[k - 1];
      if (x[v] + 1.0 <= model.vars()[v].hi + 1e-9) {
        x[v] += 1.0;
        break;
      }
      x[v] = std::ceil(model.vars()[v].lo - 1e-9);
      --k;
    }
    if (k == 0) break;
  }
  best.node_count = count;
  if (!std::isfinite(best_obj)) return best;
  best.status = SolveStatus::Optimal;
  best.objective = model.objective().evaluate(best.assignment);
  best.bound = best.objective;
  return best;
}

}  // namespace transit::milp
