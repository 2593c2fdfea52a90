#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "transit/milp/model.hpp"

namespace transit::milp {

// Range of a linear expression over the variable boxes.
inline std::pair<double, double> expr_range(const MilpModel& m, const LinExpr& e) {
  double lo = e.constant(), hi = e.constant();
  for (const auto& [v, c] : e.terms()) {
    const auto& d = m.var(v);
    lo += c > 0 ? c * d.lo : c * d.hi;
    hi += c > 0 ? c * d.hi : c * d.lo;
  }
  return {lo, hi};
}

enum class ProductForm {
  Exact,      // w == b * e for binary b
  LowerOnly,  // w >= b * e only; enough when w is minimized with a positive weight
};

// Linearizes b * e where b is 0/1-valued (a constant or an expression over
// binaries) and e is bounded. Constants short-circuit, so the same code gives
// the fixed form when predecessors are numbers. `integral` declares the
// auxiliary variable integer, valid when e is integer-valued.
inline LinExpr product(MilpModel& m, const LinExpr& b, const LinExpr& e, const std::string& name,
                       ProductForm form = ProductForm::Exact, bool integral = false) {
  if (!b.has_terms()) return e * b.constant();
  if (!e.has_terms()) return b * e.constant();
  const auto [lo, hi] = expr_range(m, e);
  const double wlo = form == ProductForm::LowerOnly ? 0.0 : std::min(lo, 0.0);
  const double whi = std::max(hi, 0.0);
  const VarId w = integral ? m.add_integer(name, std::ceil(wlo - 1e-9), std::floor(whi + 1e-9))
                           : m.add_continuous(name, wlo, whi);
  const LinExpr W(w);
  // w >= e - hi (1 - b)   and   w >= lo b
  m.add_constraint(W - e - b * hi, Sense::GreaterEqual, -hi, name + "_ge1");
  if (lo < 0) m.add_constraint(W - b * lo, Sense::GreaterEqual, 0.0, name + "_ge2");
  if (form == ProductForm::Exact) {
    // w <= e - lo (1 - b)   and   w <= hi b
    m.add_constraint(W - e - b * lo, Sense::LessEqual, -lo, name + "_le1");
    m.add_constraint(W - b * hi, Sense::LessEqual, 0.0, name + "_le2");
  }
  return W;
}

}  // namespace transit::milp
