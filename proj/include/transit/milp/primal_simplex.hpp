#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "transit/milp/lp.hpp"

namespace transit::milp {

// Two-phase bounded-variable primal simplex with Bland's rule throughout.
// Slow but simple; used as the independent LP engine of the brute-force oracle.
struct PrimalResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

inline PrimalResult primal_simplex(const LpProblem& lp, long max_iterations = 200000) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kEps = 1e-9;
  const int n = lp.num_cols();
  const int m = lp.num_rows();

  // Shift every column to [0, u]; then each row gets a slack and an artificial.
  std::vector<int> slack_of(m, -1);
  int cols = n;
  for (int i = 0; i < m; ++i)
    if (lp.rows[i].sense != Sense::Equal) slack_of[i] = cols++;
  const int first_art = cols;
  cols += m;

  std::vector<double> upper(cols, kInf);
  for (int j = 0; j < n; ++j) upper[j] = lp.hi[j] - lp.lo[j];
  std::vector<double> tab(static_cast<std::size_t>(m) * cols, 0.0);
  auto t = [&](int i, int j) -> double& { return tab[static_cast<std::size_t>(i) * cols + j]; };
  std::vector<double> xb(m);
  for (int i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    double rhs = row.rhs;
    for (const auto& [j, a] : row.coefs) {
      t(i, j) += a;
      rhs -= a * lp.lo[j];
    }
    if (row.sense == Sense::LessEqual) t(i, slack_of[i]) = 1.0;
    if (row.sense == Sense::GreaterEqual) t(i, slack_of[i]) = -1.0;
    if (rhs < 0) {
      for (int j = 0; j < cols; ++j) t(i, j) = -t(i, j);
      rhs = -rhs;
    }
    t(i, first_art + i) = 1.0;
    xb[i] = rhs;
  }
  std::vector<int> basis(m);
  std::vector<int> row_of(cols, -1);
  std::vector<char> at_upper(cols, 0);
  for (int i = 0; i < m; ++i) basis[i] = first_art + i, row_of[first_art + i] = i;

  auto run = [&](const std::vector<double>& cost) -> LpStatus {
    for (long it = 0; it < max_iterations; ++it) {
      int q = -1;
      for (int j = 0; j < cols && q < 0; ++j) {
        if (row_of[j] >= 0 || upper[j] <= 0.0) continue;
        double d = cost[j];
        for (int i = 0; i < m; ++i) d -= cost[basis[i]] * t(i, j);
        if ((!at_upper[j] && d < -kEps) || (at_upper[j] && d > kEps)) q = j;
      }
      if (q < 0) return LpStatus::Optimal;
      const double dir = at_upper[q] ? -1.0 : 1.0;
      double step = upper[q];
      int leave = -1;
      bool leave_upper = false;
      for (int i = 0; i < m; ++i) {
        const double c = t(i, q) * dir;
        double lim = kInf;
        bool to_upper = false;
        if (c > kEps) {
          lim = std::max(0.0, xb[i]) / c;
        } else if (c < -kEps && std::isfinite(upper[basis[i]])) {
          lim = std::max(0.0, upper[basis[i]] - xb[i]) / -c;
          to_upper = true;
        } else {
          continue;
        }
        const bool tie = lim <= step + kEps && leave >= 0 && basis[i] < basis[leave];
        if (lim < step - kEps || tie) {
          step = lim;
          leave = i;
          leave_upper = to_upper;
        }
      }
      if (!std::isfinite(step)) return LpStatus::IterationLimit;  // unbounded ray; cannot happen
      for (int i = 0; i < m; ++i) xb[i] -= t(i, q) * dir * step;
      if (leave < 0) {
        at_upper[q] = !at_upper[q];
        continue;
      }
      const double entering_value = (at_upper[q] ? upper[q] : 0.0) + dir * step;
      const int p = basis[leave];
      const double piv = t(leave, q);
      for (int j = 0; j < cols; ++j) t(leave, j) /= piv;
      for (int i = 0; i < m; ++i) {
        if (i == leave) continue;
        const double f = t(i, q);
        if (f == 0.0) continue;
        for (int j = 0; j < cols; ++j) t(i, j) -= f * t(leave, j);
      }
      basis[leave] = q;
      row_of[q] = leave;
      row_of[p] = -1;
      at_upper[p] = leave_upper;
      at_upper[q] = 0;
      xb[leave] = entering_value;
    }
    return LpStatus::IterationLimit;
  };

  std::vector<double> phase1(cols, 0.0);
  for (int i = 0; i < m; ++i) phase1[first_art + i] = 1.0;
  PrimalResult res;
  if (run(phase1) != LpStatus::Optimal) {
    res.status = LpStatus::IterationLimit;
    return res;
  }
  double infeas = 0.0;
  for (int i = 0; i < m; ++i)
    if (basis[i] >= first_art) infeas += xb[i];
  for (int j = first_art; j < cols; ++j)
    if (row_of[j] < 0 && at_upper[j]) infeas = kInf;
  if (infeas > 1e-7) {
    res.status = LpStatus::Infeasible;
    return res;
  }
  for (int j = first_art; j < cols; ++j) upper[j] = 0.0, at_upper[j] = 0;
  std::vector<double> phase2(cols, 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = lp.cost[j];
  const LpStatus st = run(phase2);
  if (st != LpStatus::Optimal) {
    res.status = st;
    return res;
  }
  res.status = LpStatus::Optimal;
  res.x.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double shifted = row_of[j] >= 0 ? xb[row_of[j]] : (at_upper[j] ? upper[j] : 0.0);
    res.x[j] = lp.lo[j] + shifted;
  }
  res.objective = lp.cost_constant;
  for (int j = 0; j < n; ++j) res.objective += lp.cost[j] * res.x[j];
  return res;
}

}  // namespace transit::milp
