#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "transit/error.hpp"

namespace transit::milp {

// Stable handle of a variable; the index is the declaration position.
struct VarId {
  std::uint32_t index = 0;
  friend auto operator<=>(const VarId&, const VarId&) = default;
};

enum class Domain { Binary, Integer, Continuous };

struct VarDef {
  std::string name;
  Domain domain = Domain::Continuous;
  double lo = 0.0;
  double hi = 0.0;

  static VarDef binary(std::string name) { return {std::move(name), Domain::Binary, 0.0, 1.0}; }
  static VarDef integer(std::string name, double lo, double hi) {
    return {std::move(name), Domain::Integer, lo, hi};
  }
  static VarDef continuous(std::string name, double lo, double hi) {
    return {std::move(name), Domain::Continuous, lo, hi};
  }
  bool is_integral() const { return domain != Domain::Continuous; }
};

class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(double constant) : constant_(constant) {}
  LinExpr(VarId v, double coef = 1.0) { terms_.emplace_back(v, coef); }  // NOLINT

  LinExpr& add(VarId v, double coef) {
    if (coef != 0.0) terms_.emplace_back(v, coef);
    return *this;
  }
  LinExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }
  LinExpr& operator+=(const LinExpr& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    constant_ += o.constant_;
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) { return *this += o * -1.0; }
  LinExpr& operator*=(double s) {
    for (auto& t : terms_) t.second *= s;
    constant_ *= s;
    return *this;
  }
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }

  // Merges duplicate variables, drops zero coefficients, sorts by VarId.
  LinExpr& normalize() {
    std::stable_sort(terms_.begin(), terms_.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<VarId, double>> merged;
    for (const auto& [v, c] : terms_) {
      if (!merged.empty() && merged.back().first == v)
        merged.back().second += c;
      else
        merged.emplace_back(v, c);
    }
    std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
    terms_ = std::move(merged);
    return *this;
  }

  const std::vector<std::pair<VarId, double>>& terms() const { return terms_; }
  double constant() const { return constant_; }
  bool has_terms() const { return !terms_.empty(); }

  template <class Values>
  double evaluate(const Values& values) const {
    double s = constant_;
    for (const auto& [v, c] : terms_) s += c * values[v.index];
    return s;
  }

 private:
  std::vector<std::pair<VarId, double>> terms_;
  double constant_ = 0.0;
};

enum class Sense { LessEqual, Equal, GreaterEqual };

inline const char* to_string(Sense s) {
  switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::Equal: return "=";
    case Sense::GreaterEqual: return ">=";
  }
  return "?";
}

// expr never carries a constant once stored in a model: it is moved into rhs.
struct Constraint {
  LinExpr expr;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string label;
};

class MilpModel {
 public:
  VarId add_var(VarDef def) {
    check_mutable();
    if (var_index_.count(def.name)) throw DuplicateName(def.name);
    if (!std::isfinite(def.lo) || !std::isfinite(def.hi) || def.lo > def.hi)
      throw ModelError("variable " + def.name + " needs finite bounds lo <= hi");
    if (def.domain == Domain::Binary) {
      def.lo = std::max(def.lo, 0.0);
      def.hi = std::min(def.hi, 1.0);
    }
    VarId id{static_cast<std::uint32_t>(vars_.size())};
    var_index_.emplace(def.name, id);
    vars_.push_back(std::move(def));
    var_tags_.push_back(current_tag_);
    priority_.push_back(0);
    return id;
  }
  VarId add_binary(std::string name) { return add_var(VarDef::binary(std::move(name))); }
  VarId add_integer(std::string name, double lo, double hi) {
    return add_var(VarDef::integer(std::move(name), lo, hi));
  }
  VarId add_continuous(std::string name, double lo, double hi) {
    return add_var(VarDef::continuous(std::move(name), lo, hi));
  }

  // Adds `expr sense rhs`. Constants in expr move to the right-hand side. A
  // constraint without variables is checked on the spot: satisfied ones are
  // dropped (returns false), violated ones mark the model infeasible.
  bool add_constraint(LinExpr expr, Sense sense, double rhs, std::string label) {
    check_mutable();
    if (constraint_index_.count(label)) throw DuplicateName(label);
    expr.normalize();
    for (const auto& [v, c] : expr.terms())
      if (v.index >= vars_.size()) throw ModelError("unknown variable in " + label);
    rhs -= expr.constant();
    expr.add_constant(-expr.constant());
    if (!expr.has_terms()) {
      const double tol = 1e-9 * (1.0 + std::abs(rhs));
      const bool ok = (sense == Sense::LessEqual && 0.0 <= rhs + tol) ||
                      (sense == Sense::GreaterEqual && 0.0 >= rhs - tol) ||
                      (sense == Sense::Equal && std::abs(rhs) <= tol);
      if (!ok) trivially_infeasible_.push_back(label);
      return false;
    }
    constraint_index_.emplace(label, constraints_.size());
    constraints_.push_back(Constraint{std::move(expr), sense, rhs, std::move(label)});
    constraint_tags_.push_back(current_tag_);
    return true;
  }

  void set_objective(LinExpr obj) {
    check_mutable();
    obj.normalize();
    objective_ = std::move(obj);
  }

  void freeze() { frozen_ = true; }
  // Mutable copy, e.g. to fix some variables of a frozen model.
  MilpModel thawed() const {
    MilpModel m = *this;
    m.frozen_ = false;
    return m;
  }
  bool frozen() const { return frozen_; }

  // Tag applied to every variable and constraint added afterwards.
  void set_block_tag(std::string tag) { current_tag_ = std::move(tag); }
  const std::string& block_tag() const { return current_tag_; }
  void tag_var(VarId v, std::string tag) {
    check_mutable();
    var_tags_.at(v.index) = std::move(tag);
  }

  // Branching prefers fractional variables with the lowest priority value.
  void set_branch_priority(VarId v, int priority) {
    check_mutable();
    priority_.at(v.index) = priority;
  }
  int branch_priority(VarId v) const { return priority_.at(v.index); }

  std::size_t num_vars() const { return vars_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }
  const VarDef& var(VarId v) const { return vars_.at(v.index); }
  const std::vector<VarDef>& vars() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const LinExpr& objective() const { return objective_; }
  const std::string& var_tag(VarId v) const { return var_tags_.at(v.index); }
  const std::string& constraint_tag(std::size_t i) const { return constraint_tags_.at(i); }
  const std::vector<std::string>& trivially_infeasible() const { return trivially_infeasible_; }

  std::optional<VarId> find_var(const std::string& name) const {
    auto it = var_index_.find(name);
    if (it == var_index_.end()) return std::nullopt;
    return it->second;
  }

  // Tightens the bounds of a variable (used to fix blocks to known values).
  void set_bounds(VarId v, double lo, double hi) {
    check_mutable();
    auto& d = vars_.at(v.index);
    if (lo > hi || !std::isfinite(lo) || !std::isfinite(hi))
      throw ModelError("invalid bounds for " + d.name);
    d.lo = lo;
    d.hi = hi;
  }

 private:
  void check_mutable() const {
    if (frozen_) throw FrozenModel();
  }

  std::vector<VarDef> vars_;
  std::vector<std::string> var_tags_;
  std::vector<int> priority_;
  std::unordered_map<std::string, VarId> var_index_;
  std::vector<Constraint> constraints_;
  std::vector<std::string> constraint_tags_;
  std::unordered_map<std::string, std::size_t> constraint_index_;
  std::vector<std::string> trivially_infeasible_;
  LinExpr objective_;
  std::string current_tag_;
  bool frozen_ = false;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, GapLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::GapLimit: return "gap_limit";
  }
  return "?";
}

struct MilpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> assignment;  // indexed by VarId::index
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;  // relative, as (objective - bound) / max(|objective|, 1)
  long node_count = 0;
  long lp_iterations = 0;

  // A model without variables has an empty optimal assignment.
  bool has_solution() const {
    return status == SolveStatus::Optimal || (status == SolveStatus::GapLimit && !assignment.empty());
  }
  double value(VarId v) const { return assignment.at(v.index); }
};

// Largest violation of any constraint or bound, relative to (1 + |rhs|).
inline double max_violation(const MilpModel& model, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < model.num_vars(); ++j) {
    const auto& d = model.vars()[j];
    worst = std::max({worst, d.lo - x[j], x[j] - d.hi});
  }
  for (const auto& c : model.constraints()) {
    const double act = c.expr.evaluate(x);
    double v = 0.0;
    if (c.sense != Sense::GreaterEqual) v = std::max(v, act - c.rhs);
    if (c.sense != Sense::LessEqual) v = std::max(v, c.rhs - act);
    worst = std::max(worst, v / (1.0 + std::abs(c.rhs)));
  }
  if (!model.trivially_infeasible().empty()) worst = std::max(worst, 1.0);
  return worst;
}

}  // namespace transit::milp
