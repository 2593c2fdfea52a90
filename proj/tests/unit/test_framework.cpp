#include <gtest/gtest.h>

#include <random>

#include "transit/framework/fixtures.hpp"
#include "transit/framework/pipeline.hpp"
#include "transit/framework/pos.hpp"

using namespace transit;
using namespace transit::framework;
using milp::LinExpr;
using milp::Sense;

namespace {

// x1 in [0,3] with x1 >= r; x2 in [0,10] with x2 >= c - a x1 and x2 >= 0.5.
StageList random_two_stage(std::uint32_t seed) {
  std::mt19937 rng(seed);
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * (rng() % 1000) / 999.0; };
  const double r = u(0.5, 1.0), a = u(0.0, 4.0), c = u(1.0, 6.0);
  auto s1 = std::make_shared<ScalarStage>("x1", 0.0, 3.0, [r](milp::MilpModel& m, const std::vector<Block>&, const LinExpr& x) {
    m.add_constraint(x, Sense::GreaterEqual, r, "x1_min");
  });
  auto s2 = std::make_shared<ScalarStage>("x2", 0.0, 10.0, [a, c](milp::MilpModel& m, const std::vector<Block>& prev, const LinExpr& x) {
    m.add_constraint(x + prev[0][0] * a, Sense::GreaterEqual, c, "x2_cover");
    m.add_constraint(x, Sense::GreaterEqual, 0.5, "x2_min");
  });
  return {s1, s2};
}

}  // namespace

TEST(Pipeline, TwoStageSequentialAndIntegrated) {
  auto stages = two_stage_lp(10);
  Weights w({1, 1});
  PipelineResult seq = run_sequential(stages, w);
  EXPECT_NEAR(seq.stages[0].values[0], 0.0, 1e-9);
  EXPECT_NEAR(seq.stages[1].values[0], 1.0, 1e-9);
  EXPECT_NEAR(seq.total, 1.0, 1e-9);
  PipelineResult msp = run_integrated(stages, w, 1, 2);
  EXPECT_NEAR(msp.total, 0.1, 1e-9);
  EXPECT_NEAR(pos(seq.total, msp.total), 9.0, 1e-6);
}

TEST(Pipeline, ThreeStagePartialIntegration) {
  auto stages = three_stage_lp(10);
  Weights w({1, 1, 1});
  PipelineResult seq = run_sequential(stages, w);
  EXPECT_NEAR(seq.total, 1.0, 1e-9);
  PipelineResult p12 = run_integrated(stages, w, 1, 2);
  EXPECT_NEAR(p12.stages[0].values[0], 0.1, 1e-9);
  EXPECT_NEAR(p12.stages[1].values[0], 0.0, 1e-9);
  EXPECT_NEAR(p12.stages[2].values[0], 10.0, 1e-9);
  EXPECT_NEAR(p12.total, 10.1, 1e-9);
  EXPECT_EQ(p12.stages[0].tag, "integrated(1..2)");
  EXPECT_EQ(p12.stages[2].tag, "sequential");
  PipelineResult msp = run_integrated(stages, w, 1, 3);
  EXPECT_NEAR(msp.total, 1.0, 1e-9);
  EXPECT_GT(p12.total, seq.total);
}

TEST(Pipeline, SingleStage) {
  StageList s{std::make_shared<ScalarStage>("x", 0.0, 1.0, nullptr)};
  PipelineResult r = run_sequential(s, Weights({1}));
  EXPECT_EQ(r.stages[0].values[0], 0.0);
  EXPECT_EQ(r.total, 0.0);
}

TEST(Pipeline, DiagonalIntegrationEqualsSequential) {
  auto stages = three_stage_lp(4);
  Weights w({1, 2, 3});
  PipelineResult seq = run_sequential(stages, w);
  for (int i = 1; i <= 3; ++i) {
    PipelineResult d = run_integrated(stages, w, i, i);
    EXPECT_EQ(d.total, seq.total);
    EXPECT_EQ(d.values(), seq.values());
  }
}

TEST(Pipeline, InfeasibleStageReportsIndex) {
  auto s1 = std::make_shared<ScalarStage>("x1", 0.0, 1.0, nullptr);
  auto s2 = std::make_shared<ScalarStage>("x2", 0.0, 1.0, [](milp::MilpModel& m, const std::vector<Block>& prev, const LinExpr& x) {
    m.add_constraint(x - prev[0][0], Sense::GreaterEqual, 2.0, "impossible");
  });
  try {
    run_sequential({s1, s2}, Weights({1, 1}));
    FAIL();
  } catch (const StageInfeasible& e) {
    EXPECT_EQ(e.stage(), 2);
  }
  EXPECT_THROW(run_integrated({s1, s2}, Weights({1, 1}), 1, 2), IntegrationInfeasible);
}

TEST(Weights, RejectsAllZeroAndNegative) {
  EXPECT_THROW(Weights({0, 0}), ModelError);
  EXPECT_THROW(Weights({1, -1}), ModelError);
}

TEST(Pos, Definition) {
  EXPECT_NEAR(pos(1, 0.1), 9.0, 1e-12);
  EXPECT_EQ(pos(5, 5), 0.0);
  EXPECT_NEAR(pos(10.1, 1), 9.1, 1e-12);
  EXPECT_THROW(pos(1, 0), NonpositiveOptimal);
}

TEST(Pos, WeightedBound) {
  EXPECT_EQ(pos_bound_weighted({3, 7}, Weights({1, 1})), 7);
  EXPECT_EQ(pos_bound_weighted({3, 7}, Weights({1, 0})), 3);
}

TEST(Pos, WeightedBoundHoldsOnRandomFamily) {
  for (std::uint32_t seed = 1; seed <= 30; ++seed) {
    StageList st = random_two_stage(seed);
    std::mt19937 rng(seed + 1000);
    Weights w({1.0 + rng() % 5, 1.0 + rng() % 5});
    PipelineResult seq = run_sequential(st, w);
    PipelineResult opt = run_integrated(st, w, 1, 2);
    std::vector<double> per;
    for (int i = 0; i < 2; ++i) {
      std::vector<double> unit(2, 0.0);
      unit[i] = 1.0;
      PipelineResult xi = run_integrated(st, Weights(unit), 1, 2);
      per.push_back(pos(seq.stages[i].f, xi.stages[i].f));
    }
    EXPECT_LE(pos(seq.total, opt.total), pos_bound_weighted(per, w) + 1e-9) << "seed " << seed;
    EXPECT_LE(opt.total, seq.total + 1e-6);
  }
}

TEST(Pipeline, SuffixChainAndSubsolveBound) {
  for (double n : {2.0, 5.0, 10.0}) {
    auto st = three_stage_lp(n);
    Weights w({1, 1, 1});
    PipelineResult seq = run_sequential(st, w);
    double prev = -1e100;
    for (int k = 1; k <= 3; ++k) {
      PipelineResult r = run_integrated(st, w, k, 3);
      EXPECT_GE(r.total, prev - 1e-6);
      prev = r.total;
      double seq_part = 0.0;
      for (int i = k; i <= 3; ++i) seq_part += seq.stages[i - 1].f;
      EXPECT_LE(r.int_objective, seq_part + 1e-6);
    }
    EXPECT_NEAR(prev, seq.total, 1e-9);
  }
}

namespace {
class HalfStage : public ScalarStage {
 public:
  using ScalarStage::ScalarStage;
  std::optional<Values> heuristic(const std::vector<Values>&) const override { return Values{0.5}; }
};
}  // namespace

TEST(Pipeline, HeuristicPrefixKeepsSuffixChain) {
  auto st = three_stage_lp(10);
  st[0] = std::make_shared<HalfStage>("x1", 0.0, 1.0, nullptr);
  Weights w({1, 1, 1});
  RunOptions o;
  o.heuristic_prefix = true;
  PipelineResult r2 = run_integrated(st, w, 2, 3, o);
  PipelineResult r3 = run_integrated(st, w, 3, 3, o);
  EXPECT_EQ(r2.stages[0].tag, "heuristic");
  EXPECT_EQ(r2.stages[0].values[0], 0.5);
  EXPECT_LE(r2.total, r3.total + 1e-6);
}

TEST(Pipeline, StartValuesDoNotChangeOptimum) {
  auto st = three_stage_lp(10);
  Weights w({1, 1, 1});
  PipelineResult seq = run_sequential(st, w);
  RunOptions o;
  o.start = seq.values();
  EXPECT_NEAR(run_integrated(st, w, 1, 3, o).total, 1.0, 1e-9);
}

TEST(Pipeline, JsonShape) {
  PipelineResult r = run_sequential(two_stage_lp(2), Weights({1, 1}));
  nlohmann::json j = to_json(r);
  EXPECT_EQ(j["stages"].size(), 2u);
  EXPECT_EQ(j["stages"][0]["i"], 1);
  EXPECT_TRUE(j.contains("total"));
}
