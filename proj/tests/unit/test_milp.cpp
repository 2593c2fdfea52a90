#include <gtest/gtest.h>

#include "support/random_milp.hpp"
#include "transit/milp/lp_format.hpp"
#include "transit/milp/solver.hpp"
#include "transit/milp/stats.hpp"

using namespace transit;
using namespace transit::milp;

namespace {

MilpModel two_var_example(double n, bool integral) {
  MilpModel m;
  VarId x1 = integral ? m.add_integer("x1", 0, 1) : m.add_continuous("x1", 0, 1);
  VarId x2 = integral ? m.add_integer("x2", 0, 1) : m.add_continuous("x2", 0, 1);
  m.add_constraint(LinExpr(x1) + LinExpr(x2), Sense::LessEqual, 1, "c1");
  m.add_constraint(LinExpr(x1, n) + LinExpr(x2), Sense::GreaterEqual, 1, "c2");
  m.set_objective(LinExpr(x1) + LinExpr(x2));
  m.freeze();
  return m;
}

}  // namespace

TEST(Model, AddVarKeepsOrderAndBounds) {
  MilpModel m;
  EXPECT_EQ(m.add_binary("y_L1").index, 0u);
  VarId z = m.add_integer("z_a0", -1, 2);
  EXPECT_EQ(m.var(z).lo, -1);
  EXPECT_EQ(m.var(z).hi, 2);
  EXPECT_THROW(m.add_binary("y_L1"), DuplicateName);
  m.freeze();
  EXPECT_THROW(m.add_binary("q"), FrozenModel);
}

TEST(Model, LinExprNormalizeMergesTerms) {
  VarId a{0}, b{1};
  LinExpr e = LinExpr(b, 2) + LinExpr(a, 1) + LinExpr(b, -2) + LinExpr(a, 3);
  e.normalize();
  ASSERT_EQ(e.terms().size(), 1u);
  EXPECT_EQ(e.terms()[0].first, a);
  EXPECT_EQ(e.terms()[0].second, 4);
}

TEST(Solve, ContinuousExampleGivesOneOverN) {
  MilpSolution s = solve(two_var_example(10, false));
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, 0.1, 1e-9);
  EXPECT_EQ(s.gap, 0.0);
}

TEST(Solve, EmptyModelWithOneBinary) {
  MilpModel m;
  m.add_binary("y");
  m.freeze();
  MilpSolution s = solve(m);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_EQ(s.objective, 0.0);
}

TEST(Solve, InfeasibleBinary) {
  MilpModel m;
  VarId x = m.add_binary("x");
  m.add_constraint(LinExpr(x), Sense::LessEqual, -1, "c");
  m.set_objective(LinExpr(x, -1));
  m.freeze();
  EXPECT_EQ(solve(m).status, SolveStatus::Infeasible);
  EXPECT_EQ(solve_bruteforce(m).status, SolveStatus::Infeasible);
  EXPECT_EQ(lp_relaxation(m).status, SolveStatus::Infeasible);
}

TEST(Solve, IntegralExampleNeedsBranching) {
  MilpSolution s = solve(two_var_example(10, true));
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-9);
}

TEST(Bruteforce, ThreeBinariesCoverTwo) {
  MilpModel m;
  LinExpr sum;
  for (int i = 0; i < 3; ++i) sum += LinExpr(m.add_binary("x" + std::to_string(i)));
  m.add_constraint(sum, Sense::GreaterEqual, 2, "c");
  m.set_objective(sum);
  m.freeze();
  EXPECT_NEAR(solve_bruteforce(m).objective, 2.0, 1e-12);
  EXPECT_NEAR(solve(m).objective, 2.0, 1e-12);
}

TEST(Bruteforce, ContinuousExampleMatchesLp) {
  MilpSolution s = solve_bruteforce(two_var_example(10, false));
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, 0.1, 1e-9);
}

TEST(Bruteforce, RefusesHugeDomains) {
  MilpModel m;
  for (int i = 0; i < 8; ++i) m.add_integer("x" + std::to_string(i), 0, 20);
  m.freeze();
  EXPECT_THROW(solve_bruteforce(m), TooLarge);
}

TEST(Relaxation, HalfBinary) {
  MilpModel m;
  VarId x = m.add_binary("x");
  m.add_constraint(LinExpr(x, 2), Sense::GreaterEqual, 1, "c");
  m.set_objective(LinExpr(x));
  m.freeze();
  EXPECT_NEAR(lp_relaxation(m).objective, 0.5, 1e-12);
  EXPECT_NEAR(solve(m).objective, 1.0, 1e-12);
}

TEST(Relaxation, ShortestPathFlowIsIntegral) {
  // Diamond s-a-t, s-b-t plus direct s-t; costs 1+1, 2+2, 5.
  MilpModel m;
  VarId sa = m.add_binary("sa"), at = m.add_binary("at"), sb = m.add_binary("sb"),
        bt = m.add_binary("bt"), st = m.add_binary("st");
  m.add_constraint(LinExpr(sa) + LinExpr(sb) + LinExpr(st), Sense::Equal, 1, "s");
  m.add_constraint(LinExpr(sa) - LinExpr(at), Sense::Equal, 0, "a");
  m.add_constraint(LinExpr(sb) - LinExpr(bt), Sense::Equal, 0, "b");
  m.add_constraint(LinExpr(at) + LinExpr(bt) + LinExpr(st), Sense::Equal, 1, "t");
  m.set_objective(LinExpr(sa) + LinExpr(at) + LinExpr(sb, 2) + LinExpr(bt, 2) + LinExpr(st, 5));
  m.freeze();
  EXPECT_NEAR(lp_relaxation(m).objective, solve(m).objective, 1e-9);
  EXPECT_NEAR(solve(m).objective, 2.0, 1e-9);
}

TEST(Solve, MatchesBruteforceOnRandomModels) {
  for (std::uint32_t seed = 1; seed <= 40; ++seed) {
    MilpModel m = fixtures::random_milp(seed, 8, 2, 6);
    MilpSolution a = solve(m);
    MilpSolution b = solve_bruteforce(m);
    ASSERT_EQ(a.status, b.status) << "seed " << seed;
    if (b.status != SolveStatus::Optimal) continue;
    EXPECT_NEAR(a.objective, b.objective, 1e-6) << "seed " << seed;
    EXPECT_LE(max_violation(m, a.assignment), 1e-6);
    EXPECT_LE(lp_relaxation(m).objective, a.objective + 1e-9);
  }
}

TEST(Solve, IsDeterministic) {
  MilpModel m = fixtures::random_milp(7, 10, 3, 8);
  MilpSolution a = solve(m), b = solve(m);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.assignment, b.assignment);
}

TEST(Solve, NodeLimitGivesGapLimitOrOptimal) {
  MilpModel m = fixtures::random_milp(11, 12, 0, 8);
  SolveOptions o;
  o.node_limit = 1;
  MilpSolution s = solve(m, o);
  if (s.status == SolveStatus::GapLimit && s.has_solution()) {
    EXPECT_LE(s.bound, s.objective + 1e-9);
  }
}

TEST(LpFormat, SectionsInOrder) {
  MilpModel m;
  VarId y = m.add_binary("y");
  m.set_objective(LinExpr(y));
  m.freeze();
  const std::string text = export_lp(m);
  const auto a = text.find("Minimize"), b = text.find("Binaries"), c = text.find("End");
  ASSERT_NE(a, std::string::npos);
  EXPECT_LT(a, b);
  EXPECT_LT(b, c);
}

TEST(LpFormat, LabelPrefix) {
  MilpModel m;
  VarId y = m.add_binary("y");
  m.add_constraint(LinExpr(y), Sense::GreaterEqual, 1, "L1_e0");
  m.freeze();
  EXPECT_NE(export_lp(m).find("L1_e0:"), std::string::npos);
}

TEST(LpFormat, RoundTrip) {
  for (std::uint32_t seed = 1; seed <= 10; ++seed) {
    MilpModel m = fixtures::random_milp(seed, 5, 3, 5);
    MilpModel back = parse_lp(export_lp(m));
    ASSERT_EQ(back.num_vars(), m.num_vars());
    ASSERT_EQ(back.num_constraints(), m.num_constraints());
    for (std::size_t j = 0; j < m.num_vars(); ++j) {
      EXPECT_EQ(back.vars()[j].name, m.vars()[j].name);
      EXPECT_EQ(back.vars()[j].domain, m.vars()[j].domain);
      EXPECT_EQ(back.vars()[j].lo, m.vars()[j].lo);
      EXPECT_EQ(back.vars()[j].hi, m.vars()[j].hi);
    }
    for (std::size_t r = 0; r < m.num_constraints(); ++r) {
      const auto& c = m.constraints()[r];
      const auto& d = back.constraints()[r];
      EXPECT_EQ(c.label, d.label);
      EXPECT_EQ(c.sense, d.sense);
      EXPECT_EQ(c.rhs, d.rhs);
      EXPECT_EQ(c.expr.terms(), d.expr.terms());
    }
    EXPECT_EQ(m.objective().terms(), back.objective().terms());
    EXPECT_EQ(export_lp(back), export_lp(m));
  }
}

TEST(Stats, CountsPerTag) {
  MilpModel m;
  m.set_block_tag("lin");
  std::vector<VarId> y;
  for (int i = 0; i < 6; ++i) y.push_back(m.add_binary("y" + std::to_string(i)));
  m.set_block_tag("pass");
  VarId p = m.add_binary("p");
  m.add_constraint(LinExpr(p) - LinExpr(y[0]), Sense::LessEqual, 0, "cpl");
  m.add_constraint(LinExpr(y[1]) + LinExpr(y[2]), Sense::GreaterEqual, 1, "l");
  m.freeze();
  BlockStats st = model_stats(m);
  EXPECT_EQ(st.total_vars, 7u);
  ASSERT_NE(st.find("lin"), nullptr);
  EXPECT_EQ(st.find("lin")->vars, 6u);
  EXPECT_EQ(st.find("lin")->cons, 1u);
  ASSERT_NE(st.find("lin+pass"), nullptr);
  EXPECT_EQ(st.find("lin+pass")->cons, 1u);
}

TEST(Stats, EmptyModel) {
  MilpModel m;
  m.freeze();
  BlockStats st = model_stats(m);
  EXPECT_EQ(st.total_vars, 0u);
  EXPECT_EQ(st.total_cons, 0u);
  EXPECT_TRUE(st.blocks.empty());
}
