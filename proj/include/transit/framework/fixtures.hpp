#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "transit/framework/stage.hpp"

namespace transit::framework {

// Stage with one continuous variable x_i in [lo, hi], objective x_i, and
// constraints supplied as a callback over the earlier blocks.
class ScalarStage : public Stage {
 public:
  using Builder = std::function<void(milp::MilpModel&, const std::vector<Block>&, const milp::LinExpr&)>;

  ScalarStage(std::string name, double lo, double hi, Builder builder)
      : name_(std::move(name)), lo_(lo), hi_(hi), builder_(std::move(builder)) {}

  std::string name() const override { return name_; }
  Block declare(milp::MilpModel& m) const override { return {milp::LinExpr(m.add_continuous(name_, lo_, hi_))}; }
  void constrain(milp::MilpModel& m, const std::vector<Block>& prev, const Block& own) const override {
    if (builder_) builder_(m, prev, own[0]);
  }
  milp::LinExpr objective(milp::MilpModel&, const std::vector<Block>&, const Block& own) const override {
    return own[0];
  }
  double evaluate(const std::vector<Values>& blocks) const override { return blocks.back().at(0); }

 private:
  std::string name_;
  double lo_, hi_;
  Builder builder_;
};

// Two LP stages: min x1 on [0,1]; min x2 s.t. x2 <= 1 - x1, x2 >= 1 - N x1.
inline std::vector<std::shared_ptr<const Stage>> two_stage_lp(double n) {
  using milp::LinExpr;
  using milp::Sense;
  auto s1 = std::make_shared<ScalarStage>("x1", 0.0, 1.0, nullptr);
  auto s2 = std::make_shared<ScalarStage>(
      "x2", 0.0, 1.0, [n](milp::MilpModel& m, const std::vector<Block>& prev, const LinExpr& x2) {
        const LinExpr& x1 = prev.at(0).at(0);
        m.add_constraint(x2 + x1, Sense::LessEqual, 1.0, "x2_upper");
        m.add_constraint(x2 + x1 * n, Sense::GreaterEqual, 1.0, "x2_lower");
      });
  return {s1, s2};
}

// Adds a third stage min x3 s.t. x3 >= N^2 x1, x3 in [0, N^2].
inline std::vector<std::shared_ptr<const Stage>> three_stage_lp(double n) {
  using milp::LinExpr;
  using milp::Sense;
  auto stages = two_stage_lp(n);
  stages.push_back(std::make_shared<ScalarStage>(
      "x3", 0.0, n * n, [n](milp::MilpModel& m, const std::vector<Block>& prev, const LinExpr& x3) {
        const LinExpr& x1 = prev.at(0).at(0);
        m.add_constraint(x3 - x1 * (n * n), Sense::GreaterEqual, 0.0, "x3_lower");
      }));
  return stages;
}

}  // namespace transit::framework
