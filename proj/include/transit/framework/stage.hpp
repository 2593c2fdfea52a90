#pragma once

#include <optional>
#include <string>
#include <vector>

#include "transit/milp/model.hpp"

namespace transit::framework {

// The decision vector of one stage. Each entry is either a model variable
// (the stage is being optimized) or a constant (the stage was fixed earlier).
// Stages build constraints and objectives from these expressions, so the
// same code yields the sequential and the integrated form.
using Block = std::vector<milp::LinExpr>;
using Values = std::vector<double>;

inline Block constant_block(const Values& values) {
  Block b;
  b.reserve(values.size());
  for (double v : values) b.emplace_back(v);
  return b;
}

inline Values block_values(const Block& block, const std::vector<double>& assignment) {
  Values out;
  out.reserve(block.size());
  for (const auto& e : block) out.push_back(e.evaluate(assignment));
  return out;
}

// One stage of a sequential process.
class Stage {
 public:
  virtual ~Stage() = default;

  virtual std::string name() const = 0;

  // Declares x_i and returns it as a block of single-variable expressions.
  virtual Block declare(milp::MilpModel& m) const = 0;

  // Adds F_i(x_1, ..., x_{i-1}); `prev` holds the blocks of all earlier stages.
  virtual void constrain(milp::MilpModel& m, const std::vector<Block>& prev, const Block& own) const = 0;

  // f_i as a linear expression. Products of variables are linearized here
  // with auxiliary variables; with constant predecessors no auxiliaries arise.
  virtual milp::LinExpr objective(milp::MilpModel& m, const std::vector<Block>& prev,
                                  const Block& own) const = 0;

  // f_i on numbers; `blocks` holds the values of stages 1..i.
  virtual double evaluate(const std::vector<Values>& blocks) const = 0;

  // Optional non-exact routine for this stage given fixed predecessors. Its
  // result also seeds the exact solve of the stage.
  virtual std::optional<Values> heuristic(const std::vector<Values>& /*prev*/) const {
    return std::nullopt;
  }
};

}  // namespace transit::framework
