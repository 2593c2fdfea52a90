#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "transit/milp/model.hpp"

namespace transit::milp {

// Column-indexed LP/MILP with finite box bounds on every column.
struct LpRow {
  std::vector<std::pair<int, double>> coefs;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

struct LpProblem {
  std::vector<double> cost;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<char> integer;
  std::vector<LpRow> rows;
  double cost_constant = 0.0;

  int num_cols() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
};

// Result of eliminating fixed columns and trivial rows from a model.
struct Reduction {
  bool infeasible = false;
  LpProblem lp;
  std::vector<int> col_of_var;     // -1 when the variable was fixed
  std::vector<int> var_of_col;
  std::vector<double> fixed_value;  // meaningful where col_of_var == -1

  std::vector<double> expand(std::span<const double> cols) const {
    std::vector<double> x(col_of_var.size());
    for (std::size_t v = 0; v < x.size(); ++v)
      x[v] = col_of_var[v] < 0 ? fixed_value[v] : cols[col_of_var[v]];
    return x;
  }
};

namespace detail {
constexpr double kBoundTol = 1e-9;

inline double round_down(double v, bool integral) {
  return integral ? std::floor(v + 1e-6) : v;
}
inline double round_up(double v, bool integral) {
  return integral ? std::ceil(v - 1e-6) : v;
}
}  // namespace detail

// Fixed-column removal, singleton rows to bounds, redundant and forcing rows.
// `relax` drops integrality. `lo`/`hi` override the model bounds when given.
inline Reduction reduce(const MilpModel& model, bool relax,
                        std::span<const double> lo_override = {},
                        std::span<const double> hi_override = {}) {
  using detail::kBoundTol;
  const std::size_t nv = model.num_vars();
  Reduction red;
  std::vector<double> lo(nv), hi(nv);
  std::vector<char> integral(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    const auto& d = model.vars()[j];
    lo[j] = lo_override.empty() ? d.lo : lo_override[j];
    hi[j] = hi_override.empty() ? d.hi : hi_override[j];
    integral[j] = !relax && d.is_integral();
    if (integral[j]) {
      lo[j] = std::ceil(lo[j] - 1e-9);
      hi[j] = std::floor(hi[j] + 1e-9);
    }
    if (lo[j] > hi[j] + kBoundTol) red.infeasible = true;
  }
  if (!model.trivially_infeasible().empty()) red.infeasible = true;
  if (red.infeasible) return red;

  const auto& cons = model.constraints();
  std::vector<char> active(cons.size(), 1);
  auto is_fixed = [&](std::size_t j) { return hi[j] - lo[j] <= kBoundTol; };

  bool changed = true;
  for (int pass = 0; changed && pass < 50; ++pass) {
    changed = false;
    for (std::size_t r = 0; r < cons.size(); ++r) {
      if (!active[r]) continue;
      const auto& c = cons[r];
      double rhs = c.rhs, min_act = 0.0, max_act = 0.0;
      int free_count = 0;
      std::size_t last_free = 0;
      double last_coef = 0.0;
      for (const auto& [v, a] : c.expr.terms()) {
        const std::size_t j = v.index;
        if (is_fixed(j)) {
          rhs -= a * lo[j];
          continue;
        }
        ++free_count;
        last_free = j;
        last_coef = a;
        min_act += a > 0 ? a * lo[j] : a * hi[j];
        max_act += a > 0 ? a * hi[j] : a * lo[j];
      }
      const double tol = 1e-9 * (1.0 + std::abs(rhs));
      const bool need_le = c.sense != Sense::GreaterEqual;
      const bool need_ge = c.sense != Sense::LessEqual;
      if (free_count == 0) {
        if ((need_le && 0.0 > rhs + tol) || (need_ge && 0.0 < rhs - tol)) {
          red.infeasible = true;
          return red;
        }
        active[r] = 0;
        changed = true;
        continue;
      }
      if (free_count == 1) {
        const std::size_t j = last_free;
        const double bound = rhs / last_coef;
        // a*x <= rhs  ->  x <= rhs/a (a>0) or x >= rhs/a (a<0)
        const bool upper_from_le = last_coef > 0;
        if (need_le) {
          if (upper_from_le)
            hi[j] = std::min(hi[j], detail::round_down(bound, integral[j]));
          else
            lo[j] = std::max(lo[j], detail::round_up(bound, integral[j]));
        }
        if (need_ge) {
          if (upper_from_le)
            lo[j] = std::max(lo[j], detail::round_up(bound, integral[j]));
          else
            hi[j] = std::min(hi[j], detail::round_down(bound, integral[j]));
        }
        if (lo[j] > hi[j] + 1e-9 * (1.0 + std::abs(lo[j]))) {
          red.infeasible = true;
          return red;
        }
        if (hi[j] < lo[j]) hi[j] = lo[j];
        active[r] = 0;
        changed = true;
        continue;
      }
      if ((need_le && min_act > rhs + tol) || (need_ge && max_act < rhs - tol)) {
        red.infeasible = true;
        return red;
      }
      const bool le_redundant = !need_le || max_act <= rhs + tol;
      const bool ge_redundant = !need_ge || min_act >= rhs - tol;
      if (le_redundant && ge_redundant) {
        active[r] = 0;
        changed = true;
        continue;
      }
      // Forcing rows pin every free variable at the bound attaining the extreme.
      const bool force_min = need_le && min_act >= rhs - tol;
      const bool force_max = need_ge && max_act <= rhs + tol;
      if (force_min || force_max) {
        for (const auto& [v, a] : c.expr.terms()) {
          const std::size_t j = v.index;
          if (is_fixed(j)) continue;
          const bool take_lo = (a > 0) == force_min;
          if (take_lo)
            hi[j] = lo[j];
          else
            lo[j] = hi[j];
        }
        active[r] = 0;
        changed = true;
      }
    }
  }

  // Columns that appear in no remaining row go to their cheapest bound.
  std::vector<char> used(nv, 0);
  for (std::size_t r = 0; r < cons.size(); ++r)
    if (active[r])
      for (const auto& [v, a] : cons[r].expr.terms()) used[v.index] = 1;
  std::vector<double> obj(nv, 0.0);
  for (const auto& [v, a] : model.objective().terms()) obj[v.index] += a;
  for (std::size_t j = 0; j < nv; ++j) {
    if (used[j] || is_fixed(j)) continue;
    if (obj[j] < 0)
      lo[j] = hi[j];
    else
      hi[j] = lo[j];
  }

  red.col_of_var.assign(nv, -1);
  red.fixed_value.assign(nv, 0.0);
  LpProblem& lp = red.lp;
  lp.cost_constant = model.objective().constant();
  for (std::size_t j = 0; j < nv; ++j) {
    if (is_fixed(j)) {
      double v = lo[j];
      if (integral[j]) v = std::round(v);
      red.fixed_value[j] = v;
      lp.cost_constant += obj[j] * v;
      continue;
    }
    red.col_of_var[j] = lp.num_cols();
    red.var_of_col.push_back(static_cast<int>(j));
    lp.cost.push_back(obj[j]);
    lp.lo.push_back(lo[j]);
    lp.hi.push_back(hi[j]);
    lp.integer.push_back(integral[j]);
  }
  for (std::size_t r = 0; r < cons.size(); ++r) {
    if (!active[r]) continue;
    LpRow row;
    row.sense = cons[r].sense;
    row.rhs = cons[r].rhs;
    for (const auto& [v, a] : cons[r].expr.terms()) {
      const int col = red.col_of_var[v.index];
      if (col < 0)
        row.rhs -= a * red.fixed_value[v.index];
      else
        row.coefs.emplace_back(col, a);
    }
    if (row.coefs.empty()) {
      const double tol = 1e-9 * (1.0 + std::abs(row.rhs));
      if ((row.sense != Sense::GreaterEqual && 0.0 > row.rhs + tol) ||
          (row.sense != Sense::LessEqual && 0.0 < row.rhs - tol)) {
        red.infeasible = true;
        return red;
      }
      continue;
    }
    lp.rows.push_back(std::move(row));
  }
  return red;
}

enum class LpStatus { Optimal, Infeasible, IterationLimit };

// Dense-tableau dual simplex over boxed columns. Every column has finite
// bounds, so any basis can be made dual feasible by parking nonbasic columns
// at the bound matching the sign of their reduced cost. This lets branch and
// bound re-optimize any node from whatever basis is current.
class DualSimplex {
 public:
  explicit DualSimplex(const LpProblem& lp)
      : n_(lp.num_cols()), m_(lp.num_rows()), cols_(n_ + m_), rows_(lp.rows) {
    cost_.assign(cols_, 0.0);
    lo_.assign(cols_, 0.0);
    hi_.assign(cols_, 0.0);
    for (int j = 0; j < n_; ++j) {
      cost_[j] = lp.cost[j];
      lo_[j] = lp.lo[j];
      hi_[j] = lp.hi[j];
    }
    cost_constant_ = lp.cost_constant;
    rhs_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp.rows[i];
      double min_act = 0.0, max_act = 0.0;
      for (const auto& [j, a] : row.coefs) {
        min_act += a > 0 ? a * lo_[j] : a * hi_[j];
        max_act += a > 0 ? a * hi_[j] : a * lo_[j];
      }
      rhs_[i] = row.rhs;
      // row: a.x + s = rhs
      const int s = n_ + i;
      switch (row.sense) {
        case Sense::LessEqual:
          lo_[s] = 0.0;
          hi_[s] = std::max(0.0, row.rhs - min_act);
          break;
        case Sense::GreaterEqual:
          lo_[s] = std::min(0.0, row.rhs - max_act);
          hi_[s] = 0.0;
          break;
        case Sense::Equal:
          lo_[s] = hi_[s] = 0.0;
          break;
      }
    }
    reset_to_slack_basis();
  }

  int num_cols() const { return n_; }

  void set_bounds(int j, double lo, double hi) {
    lo_[j] = lo;
    hi_[j] = hi;
  }
  double lower(int j) const { return lo_[j]; }
  double upper(int j) const { return hi_[j]; }

  LpStatus solve(long max_iterations = 1'000'000) {
    place_nonbasic();
    long since_progress = 0;
    double last_obj = -std::numeric_limits<double>::infinity();
    bool bland = false;
    for (long it = 0; it < max_iterations; ++it) {
      const int r = choose_leaving(bland);
      if (r < 0) return LpStatus::Optimal;
      const int q = choose_entering(r, bland);
      if (q < 0) {
        // A drifted tableau can fake a proof; trust it only once it is checked
        // against the original rows or the tableau is freshly factored.
        if (certifies_infeasible(r) || pivots_since_refactor_ == 0) return LpStatus::Infeasible;
        refactor();
        place_nonbasic();
        continue;
      }
      pivot(r, q);
      ++iterations_;
      if (++pivots_since_refactor_ >= refactor_interval()) refactor();
      const double obj = dual_objective_estimate();
      if (obj > last_obj + 1e-9) {
        last_obj = obj;
        since_progress = 0;
        bland = false;
      } else if (++since_progress > 50) {
        bland = true;
      }
    }
    return LpStatus::IterationLimit;
  }

  double objective() const {
    double s = cost_constant_;
    for (int j = 0; j < n_; ++j) s += cost_[j] * x_[j];
    return s;
  }
  std::vector<double> primal() const { return {x_.begin(), x_.begin() + n_}; }
  double value(int j) const { return x_[j]; }
  long iterations() const { return iterations_; }

 private:
  static constexpr double kFeasTol = 1e-7;
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kDualTol = 1e-9;

  double& t(int i, int j) { return tab_[static_cast<std::size_t>(i) * cols_ + j]; }
  double t(int i, int j) const { return tab_[static_cast<std::size_t>(i) * cols_ + j]; }

  long refactor_interval() const { return std::max<long>(200, 2L * m_); }

  void reset_to_slack_basis() {
    tab_.assign(static_cast<std::size_t>(m_) * cols_, 0.0);
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, a] : rows_[i].coefs) t(i, j) += a;
      t(i, n_ + i) = 1.0;
    }
    basis_.resize(m_);
    row_of_.assign(cols_, -1);
    at_upper_.assign(cols_, 0);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      row_of_[n_ + i] = i;
    }
    d_ = cost_;
    beta_ = rhs_;
    x_.assign(cols_, 0.0);
    for (int j = 0; j < cols_; ++j) {
      if (row_of_[j] >= 0) continue;
      at_upper_[j] = d_[j] < 0;
      x_[j] = at_upper_[j] ? hi_[j] : lo_[j];
    }
    recompute_basic_values();
    pivots_since_refactor_ = 0;
  }

  // x_B = B^{-1} rhs - T_N x_N, with B^{-1} rhs kept in beta_.
  void recompute_basic_values() {
    for (int i = 0; i < m_; ++i) {
      double v = beta_[i];
      for (int j = 0; j < cols_; ++j)
        if (row_of_[j] < 0 && x_[j] != 0.0) v -= t(i, j) * x_[j];
      x_[basis_[i]] = v;
    }
  }

  void place_nonbasic() {
    for (int j = 0; j < cols_; ++j) {
      if (row_of_[j] >= 0) continue;
      bool upper = at_upper_[j];
      if (d_[j] > kDualTol)
        upper = false;
      else if (d_[j] < -kDualTol)
        upper = true;
      const double target = upper ? hi_[j] : lo_[j];
      at_upper_[j] = upper;
      const double delta = target - x_[j];
      if (delta == 0.0) continue;
      for (int i = 0; i < m_; ++i) {
        const double a = t(i, j);
        if (a != 0.0) x_[basis_[i]] -= a * delta;
      }
      x_[j] = target;
    }
  }

  int choose_leaving(bool bland) const {
    int best = -1;
    double best_viol = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[i];
      const double tol = kFeasTol * (1.0 + std::abs(x_[b]));
      double viol = 0.0;
      if (x_[b] < lo_[b] - tol)
        viol = lo_[b] - x_[b];
      else if (x_[b] > hi_[b] + tol)
        viol = x_[b] - hi_[b];
      if (viol <= 0.0) continue;
      if (bland) {
        if (best < 0 || b < basis_[best]) best = i;
      } else if (viol > best_viol) {
        best_viol = viol;
        best = i;
      }
    }
    return best;
  }

  int choose_entering(int r, bool bland) const {
    const int b = basis_[r];
    const bool increase = x_[b] < lo_[b];
    // Harris two-pass ratio test.
    double theta_max = std::numeric_limits<double>::infinity();
    auto eligible = [&](int j, double& mag, double& alpha) {
      if (row_of_[j] >= 0 || hi_[j] - lo_[j] <= 1e-12) return false;
      alpha = t(r, j);
      if (std::abs(alpha) <= kPivotTol) return false;
      const bool up = at_upper_[j];
      // x_b moves by -alpha * dx_j; lower-bound columns have dx_j > 0.
      const bool helps = increase ? (up ? alpha > 0 : alpha < 0) : (up ? alpha < 0 : alpha > 0);
      if (!helps) return false;
      mag = up ? std::max(0.0, -d_[j]) : std::max(0.0, d_[j]);
      return true;
    };
    double mag = 0.0, alpha = 0.0;
    for (int j = 0; j < cols_; ++j) {
      if (!eligible(j, mag, alpha)) continue;
      theta_max = std::min(theta_max, (mag + kDualTol) / std::abs(alpha));
    }
    if (!std::isfinite(theta_max)) return -1;
    if (bland) {
      // Lowest index among the stable candidates of the Harris set.
      double max_alpha = 0.0;
      for (int j = 0; j < cols_; ++j)
        if (eligible(j, mag, alpha) && mag / std::abs(alpha) <= theta_max)
          max_alpha = std::max(max_alpha, std::abs(alpha));
      for (int j = 0; j < cols_; ++j)
        if (eligible(j, mag, alpha) && mag / std::abs(alpha) <= theta_max && std::abs(alpha) >= 0.01 * max_alpha)
          return j;
      return -1;
    }
    int best = -1;
    double best_alpha = 0.0;
    for (int j = 0; j < cols_; ++j) {
      if (!eligible(j, mag, alpha)) continue;
      if (mag / std::abs(alpha) > theta_max) continue;
      if (std::abs(alpha) > best_alpha) {
        best_alpha = std::abs(alpha);
        best = j;
      }
    }
    return best;
  }

  void pivot(int r, int q) {
    const int p = basis_[r];
    const double target = x_[p] < lo_[p] ? lo_[p] : hi_[p];
    const double alpha = t(r, q);
    const double dq = (x_[p] - target) / alpha;
    for (int i = 0; i < m_; ++i) {
      const double a = t(i, q);
      if (a != 0.0) x_[basis_[i]] -= a * dq;
    }
    x_[q] += dq;
    x_[p] = target;

    nz_.clear();
    double* prow = &t(r, 0);
    const double inv = 1.0 / alpha;
    for (int j = 0; j < cols_; ++j) {
      if (prow[j] != 0.0) {
        prow[j] *= inv;
        if (std::abs(prow[j]) < 1e-13)
          prow[j] = 0.0;
        else
          nz_.push_back(j);
      }
    }
    beta_[r] *= inv;
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &t(i, 0);
      const double f = row[q];
      if (f == 0.0) continue;
      for (int j : nz_) row[j] -= f * prow[j];
      row[q] = 0.0;
      beta_[i] -= f * beta_[r];
    }
    const double fd = d_[q];
    if (fd != 0.0)
      for (int j : nz_) d_[j] -= fd * prow[j];
    d_[q] = 0.0;

    basis_[r] = q;
    row_of_[q] = r;
    row_of_[p] = -1;
    at_upper_[p] = (target == hi_[p] && target != lo_[p]);
  }

  // Row r of B^{-1} sits in the slack columns of the tableau. Rebuilt from the
  // original rows it gives y^T [A I] x = y^T rhs; infeasibility is certified
  // when the bounds cannot reach that value.
  bool certifies_infeasible(int r) const {
    std::vector<double> alpha(cols_, 0.0);
    double rhs = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double y = t(r, n_ + i);
      if (y == 0.0) continue;
      rhs += y * rhs_[i];
      for (const auto& [j, a] : rows_[i].coefs) alpha[j] += y * a;
      alpha[n_ + i] += y;
    }
    double lo = 0.0, hi = 0.0, scale = 1.0 + std::abs(rhs);
    for (int j = 0; j < cols_; ++j) {
      const double a = alpha[j];
      if (a == 0.0) continue;
      lo += a * (a > 0 ? lo_[j] : hi_[j]);
      hi += a * (a > 0 ? hi_[j] : lo_[j]);
      scale += std::abs(a) * std::max(std::abs(lo_[j]), std::abs(hi_[j]));
    }
    const double tol = kFeasTol * scale;
    return rhs < lo - tol || rhs > hi + tol;
  }

  double dual_objective_estimate() const {
    // Primal objective of the current (dual feasible) basis; it is
    // nondecreasing along dual simplex iterations.
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += cost_[j] * x_[j];
    return s;
  }

  // Rebuilds B^{-1}[A I] from the original rows for the current basis.
  void refactor() {
    pivots_since_refactor_ = 0;
    std::vector<double> fresh(static_cast<std::size_t>(m_) * cols_, 0.0);
    std::vector<double> beta(rhs_);
    auto f = [&](int i, int j) -> double& { return fresh[static_cast<std::size_t>(i) * cols_ + j]; };
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, a] : rows_[i].coefs) f(i, j) += a;
      f(i, n_ + i) = 1.0;
    }
    std::vector<char> assigned(m_, 0);
    std::vector<int> new_basis(m_, -1);
    std::vector<int> order(basis_.begin(), basis_.end());
    std::vector<int> nz;
    for (int q : order) {
      int piv = -1;
      double best = 1e-9;
      for (int i = 0; i < m_; ++i)
        if (!assigned[i] && std::abs(f(i, q)) > best) best = std::abs(f(i, q)), piv = i;
      if (piv < 0) {
        reset_to_slack_basis();
        return;
      }
      assigned[piv] = 1;
      new_basis[piv] = q;
      const double inv = 1.0 / f(piv, q);
      nz.clear();
      for (int j = 0; j < cols_; ++j)
        if (f(piv, j) != 0.0) f(piv, j) *= inv, nz.push_back(j);
      beta[piv] *= inv;
      for (int i = 0; i < m_; ++i) {
        if (i == piv) continue;
        const double g = f(i, q);
        if (g == 0.0) continue;
        for (int j : nz) f(i, j) -= g * f(piv, j);
        f(i, q) = 0.0;
        beta[i] -= g * beta[piv];
      }
    }
    tab_ = std::move(fresh);
    beta_ = std::move(beta);
    basis_ = new_basis;
    std::fill(row_of_.begin(), row_of_.end(), -1);
    for (int i = 0; i < m_; ++i) row_of_[basis_[i]] = i;
    d_ = cost_;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j < cols_; ++j) d_[j] -= cb * t(i, j);
    }
    for (int i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
    recompute_basic_values();
  }

  int n_, m_, cols_;
  std::vector<LpRow> rows_;
  std::vector<double> rhs_;
  std::vector<double> beta_;
  std::vector<double> cost_, lo_, hi_, d_, x_;
  double cost_constant_ = 0.0;
  std::vector<double> tab_;
  std::vector<int> basis_, row_of_;
  std::vector<char> at_upper_;
  std::vector<int> nz_;
  long iterations_ = 0;
  long pivots_since_refactor_ = 0;
};

}  // namespace transit::milp
