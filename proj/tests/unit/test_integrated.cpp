#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "transit/integrated/integrated.hpp"
#include "transit/integrated/validate.hpp"
#include "transit/ptn/generators.hpp"

using namespace transit;
using integrated::Approach;

namespace {

void expect_valid(const ean::Network& n, const integrated::PlanReport& r) {
  EXPECT_TRUE(integrated::check_plan(n.inst, r.plan).empty()) << r.approach;
  EXPECT_TRUE(integrated::check_routing(n, r.plan, r.routing).empty()) << r.approach;
  EXPECT_TRUE(integrated::check_timetable(n, r.plan, r.timetable).empty()) << r.approach;
  EXPECT_TRUE(integrated::check_schedule(n, r.trips, r.schedule).empty()) << r.approach;
}

integrated::ApproachOptions limited(double seconds, bool warm = true) {
  integrated::ApproachOptions o;
  o.solve.time_limit = seconds;
  o.warm_start = warm;
  return o;
}

}  // namespace

TEST(Integrated, SequentialOnSmallIsConsistent) {
  const auto net = ean::make_network(ptn::make_small());
  const auto lam = integrated::Lambda::from(net->inst);
  const auto r = integrated::run_approach(net, Approach::Seq, lam);
  ASSERT_EQ(r.pipeline.solves.size(), 4u);
  const double f[] = {r.f1, r.f2, r.f3, r.f4};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(r.pipeline.solves[i].status, milp::SolveStatus::Optimal);
    EXPECT_NEAR(r.pipeline.solves[i].objective, f[i], 1e-6) << "stage " << i + 1;
  }
  expect_valid(*net, r);
  EXPECT_NEAR(r.f2, pass::route_oracle(*net, r.plan.lines()).f2, 1e-6);
  EXPECT_EQ(r.trips.size(), r.plan.lines().size() * net->inst.params.periods.size());
  EXPECT_NEAR(r.total, lam.l3 * r.f3 + lam.l4 * r.f4, 1e-9);
}

TEST(Integrated, PartialApproachesOnSmallDoNotLoseToSequential) {
  const auto net = ean::make_network(ptn::make_small());
  const auto lam = integrated::Lambda::from(net->inst);
  const auto seq = integrated::run_approach(net, Approach::Seq, lam);
  for (Approach a : {Approach::TimPass, Approach::LinTimPass, Approach::TimVeh}) {
    const auto r = integrated::run_approach(net, a, lam, limited(20));
    EXPECT_LE(r.total, seq.total + 1e-6) << r.approach;
    expect_valid(*net, r);
  }
}

TEST(Integrated, FullWithWarmStartOnSmall) {
  const auto net = ean::make_network(ptn::make_small());
  const auto lam = integrated::Lambda::from(net->inst);
  const auto seq = integrated::run_approach(net, Approach::Seq, lam);
  const auto r = integrated::run_approach(net, Approach::Full, lam, limited(5));
  EXPECT_LE(r.total, seq.total + 1e-6);
  EXPECT_GE(r.gap(), 0.0);
  expect_valid(*net, r);
}

TEST(Integrated, FullNeverWorseOnRandomFamily) {
  for (std::uint32_t seed = 1; seed <= 6; ++seed) {
    const auto net = ean::make_network(ptn::make_random(seed));
    const auto lam = integrated::Lambda::from(net->inst);
    const auto seq = integrated::run_approach(net, Approach::Seq, lam);
    const auto full = integrated::run_approach(net, Approach::Full, lam, limited(60, false));
    ASSERT_EQ(full.gap(), 0.0) << seed;
    EXPECT_LE(full.total, seq.total + 1e-6) << seed;
    expect_valid(*net, full);
  }
}

TEST(Integrated, LambdaChecks) {
  EXPECT_THROW((integrated::Lambda{0, 0, 0}.check()), ModelError);
  EXPECT_THROW((integrated::Lambda{-1, 1, 1}.check()), ModelError);
  EXPECT_NO_THROW((integrated::Lambda{0, 0, 1}.check()));
}

TEST(Integrated, ParseApproach) {
  for (Approach a : integrated::all_approaches()) EXPECT_EQ(integrated::parse_approach(integrated::to_string(a)), a);
  EXPECT_FALSE(integrated::parse_approach("lin").has_value());
}

TEST(Integrated, PosAgainstReference) {
  integrated::PlanReport r, ref;
  r.total = 15;
  ref.total = 10;
  integrated::attach_pos(r, ref);
  ASSERT_TRUE(r.pos.has_value());
  EXPECT_DOUBLE_EQ(*r.pos, 0.5);
  ref.total = 0;
  integrated::PlanReport s;
  integrated::attach_pos(s, ref);
  EXPECT_FALSE(s.pos.has_value());
}

TEST(Integrated, SweepFlagsDominatedPoints) {
  const auto net = ean::make_network(ptn::make_random(3));
  const std::vector<integrated::Lambda> lams{{0, 10, 1}, {0, 1, 0}, {0, 0, 1}, {0, 40, 1}};
  const auto reports = integrated::pareto_sweep(net, lams, {Approach::Full}, limited(30));
  ASSERT_EQ(reports.size(), 4u);
  for (const auto& r : reports) {
    EXPECT_EQ(r.approach, "full");
    if (r.gap() == 0.0 && r.lambda.l3 > 0 && r.lambda.l4 > 0) {
      EXPECT_FALSE(r.dominated);
    }
  }
  const auto one = integrated::pareto_sweep(net, {{0, 1, 1}}, {Approach::Seq});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_FALSE(one[0].dominated);
}

TEST(Integrated, ReportIsDeterministic) {
  const auto net = ean::make_network(ptn::make_small());
  const auto lam = integrated::Lambda::from(net->inst);
  const auto a = integrated::to_json(integrated::run_approach(net, Approach::TimVeh, lam)).dump(2);
  const auto b = integrated::to_json(integrated::run_approach(net, Approach::TimVeh, lam)).dump(2);
  EXPECT_EQ(a, b);
  const auto j = nlohmann::json::parse(a);
  EXPECT_EQ(j["approach"], "timveh");
  EXPECT_EQ(j["integrated_stages"], nlohmann::json({3, 4}));
  EXPECT_TRUE(j.contains("objectives"));
}

TEST(Integrated, SweepCsvHasHeader) {
  const auto net = ean::make_network(ptn::make_random(2));
  const auto reports = integrated::pareto_sweep(net, {{0, 1, 1}}, {Approach::Seq, Approach::TimVeh});
  const auto file = std::filesystem::temp_directory_path() / "transit_sweep.csv";
  integrated::write_sweep_csv(reports, file);
  std::ifstream is(file);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "approach;lambda1;lambda3;lambda4;f1;f2;f3;f4;total;pos;gap");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 2);
}
