#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "transit/ptn/generators.hpp"
#include "transit/ptn/io.hpp"
#include "transit/ptn/turnarounds.hpp"

using namespace transit;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("transit_ptn_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

void write_two_stop(const fs::path& d) {
  write(d / "stops.csv", "# two stops\nid;name;L_wait;U_wait;L_trans;U_trans\n1;a;1;3;2;11\n2;b;1;3;2;11\n");
  write(d / "edges.csv", "id;u;v;length;L_drive;U_drive;f_min;f_max\n1;1;2;1.5;2;4;1;2\n");
  write(d / "od.csv", "u;v;demand\n1;2;5\n");
  write(d / "pool.csv", "line_id;edge_ids;cost\n7;1;2.5\n");
  write(d / "config.csv", "key;value\nperiod_T;10\nperiods;0,1\n");
}

}  // namespace

TEST(Ptn, SmallHasPathTopologyAndSixLines) {
  const auto inst = ptn::make_small();
  EXPECT_EQ(inst.stops.size(), 4u);
  EXPECT_EQ(inst.edges.size(), 3u);
  EXPECT_EQ(inst.pool.size(), 6u);
  EXPECT_EQ(inst.od.size(), 6u);
  EXPECT_EQ(inst.pool.back().stops, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_DOUBLE_EQ(inst.pool.back().cost, 4.0);
}

TEST(Ptn, SmallOverrideSetsPeriod) {
  ptn::Overrides o;
  o.T = 12;
  const auto inst = ptn::make_small(o);
  EXPECT_EQ(inst.params.T, 12);
  EXPECT_EQ(inst.stops[0].U_trans, inst.stops[0].L_trans + 11);
}

TEST(Ptn, ToyHasEightStopsEightEdgesSixteenLines) {
  const auto inst = ptn::make_toy();
  EXPECT_EQ(inst.stops.size(), 8u);
  EXPECT_EQ(inst.edges.size(), 8u);
  EXPECT_EQ(inst.pool.size(), 16u);
  // Maximal paths run from a source stop to a sink stop.
  for (std::size_t i = 8; i < 16; ++i) {
    EXPECT_TRUE(inst.pool[i].first_stop() == 1 || inst.pool[i].first_stop() == 2);
    EXPECT_TRUE(inst.pool[i].last_stop() == 7 || inst.pool[i].last_stop() == 8);
  }
  ptn::Overrides o;
  o.periods = std::vector<int>{1, 0, 1};
  const auto two = ptn::make_toy(o);
  EXPECT_EQ(two.params.periods, (std::vector<int>{0, 1}));
}

TEST(Ptn, LoadsWellFormedDirectory) {
  const auto d = scratch_dir("two");
  write_two_stop(d);
  const auto inst = ptn::load_instance(d);
  EXPECT_EQ(inst.stops.size(), 2u);
  EXPECT_EQ(inst.edges.size(), 1u);
  EXPECT_EQ(inst.pool[0].id, 7);
  EXPECT_EQ(inst.pool[0].stops, (std::vector<int>{1, 2}));
  EXPECT_DOUBLE_EQ(inst.pool[0].length, 1.5);
  EXPECT_DOUBLE_EQ(inst.od.at({1, 2}), 5.0);
}

TEST(Ptn, UnknownEdgeInPoolIsRejected) {
  const auto d = scratch_dir("badpool");
  write_two_stop(d);
  write(d / "pool.csv", "line_id;edge_ids;cost\n1;9;1\n");
  EXPECT_THROW(ptn::load_instance(d), ValidationError);
}

TEST(Ptn, MalformedNumberReportsFileAndLine) {
  const auto d = scratch_dir("badnum");
  write_two_stop(d);
  write(d / "edges.csv", "id;u;v;length;L_drive;U_drive;f_min;f_max\n\n1;1;2;x;2;4;1;2\n");
  try {
    ptn::load_instance(d);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.file(), "edges.csv");
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Ptn, HeaderRowIsRequired) {
  const auto d = scratch_dir("noheader");
  write_two_stop(d);
  write(d / "od.csv", "# nothing here\n");
  EXPECT_THROW(ptn::load_instance(d), ParseError);
}

TEST(Ptn, InvariantsAreChecked) {
  auto inst = ptn::make_small();
  inst.edges[0].f_min = 4;
  EXPECT_THROW(ptn::validate(inst), ValidationError);
  inst = ptn::make_small();
  inst.stops[1].L_wait = 5;
  EXPECT_THROW(ptn::validate(inst), ValidationError);
  inst = ptn::make_small();
  inst.od[{2, 2}] = 1.0;
  EXPECT_THROW(ptn::validate(inst), ValidationError);
  inst = ptn::make_small();
  inst.params.T = 1;
  EXPECT_THROW(ptn::validate(inst), ValidationError);
  inst = ptn::make_small();
  inst.params.periods.clear();
  EXPECT_THROW(ptn::validate(inst), ValidationError);
}

TEST(Ptn, LinesMustBeSimplePaths) {
  auto inst = ptn::make_small();
  inst.pool[0].edges = {1, 3};
  EXPECT_THROW(ptn::finalize_lines(inst), ValidationError);
}

TEST(Ptn, SaveLoadRoundTrip) {
  for (const auto& inst : {ptn::make_small(), ptn::make_toy(), ptn::make_random(11)}) {
    const auto d = scratch_dir("rt_" + inst.name);
    ptn::save_instance(inst, d);
    EXPECT_EQ(ptn::load_instance(d), inst) << inst.name;
  }
}

TEST(Ptn, RoundTripKeepsExplicitDeadheadsAndOptionalParams) {
  auto inst = ptn::make_small();
  inst.params.depot_stop = 3;
  inst.params.big_M = 7.5;
  inst.params.transfer_penalty = 0.1;
  inst.turnaround[{1, 2}] = {4, 0.25};
  inst.depot_out[1] = {2, 1.0};
  inst.depot_in[6] = {3, 2.0};
  const auto d = scratch_dir("rt_explicit");
  ptn::save_instance(inst, d);
  EXPECT_TRUE(fs::exists(d / "turnarounds.csv"));
  EXPECT_EQ(ptn::load_instance(d), inst);
}

TEST(Ptn, GeneratedSmallWritesFiveFiles) {
  const auto d = scratch_dir("five");
  ptn::save_instance(ptn::make_small(), d);
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(d)) ++files;
  EXPECT_EQ(files, 5);
}

TEST(Turnarounds, MinimumTurnaroundWhenLineEndsWhereNextStarts) {
  const auto inst = ptn::derive_turnarounds(ptn::make_small());
  // Line 1 is v1-v2, line 2 is v2-v3.
  EXPECT_EQ(inst.turnaround.at({1, 2}).time, 1);
  EXPECT_DOUBLE_EQ(inst.turnaround.at({1, 2}).distance, 0.0);
}

TEST(Turnarounds, ShortestPathTimePlusMinimumTurnaround) {
  auto inst = ptn::make_small();
  ptn::Line back;
  back.id = 7;
  back.edges = {2, 1};  // v3 -> v2 -> v1
  back.cost = 3;
  inst.pool.push_back(back);
  ptn::finalize_lines(inst);
  ASSERT_EQ(inst.pool.back().stops, (std::vector<int>{3, 2, 1}));
  const auto d = ptn::derive_turnarounds(inst);
  // Line 3 starts at v3: L(v1,v2) + L(v2,v3) + 1.
  EXPECT_EQ(d.turnaround.at({7, 3}).time, 2 + 2 + 1);
  EXPECT_DOUBLE_EQ(d.turnaround.at({7, 3}).distance, 2.0);
}

TEST(Turnarounds, DepotAtLowestStop) {
  const auto inst = ptn::derive_turnarounds(ptn::make_small());
  EXPECT_EQ(inst.depot(), 1);
  EXPECT_DOUBLE_EQ(inst.depot_out.at(1).distance, 0.0);
  EXPECT_EQ(inst.depot_out.at(1).time, 0);
  EXPECT_EQ(inst.depot_in.at(6).time, 6);  // v4 back to v1
  EXPECT_EQ(inst.depot_out.at(3).time, 4);  // v1 to v3
}

TEST(Turnarounds, IdempotentAndKeepsExplicitValues) {
  auto inst = ptn::make_small();
  inst.turnaround[{2, 2}] = {9, 9.0};
  const auto once = ptn::derive_turnarounds(inst);
  EXPECT_EQ(once.turnaround.at({2, 2}).time, 9);
  EXPECT_EQ(ptn::derive_turnarounds(once), once);
  EXPECT_EQ(once.turnaround.size(), 36u);
}

TEST(Turnarounds, DisconnectedNetworkIsReported) {
  auto inst = ptn::make_small();
  inst.stops.push_back({5, "v5", 1, 3, 2, 11});
  inst.stops.push_back({6, "v6", 1, 3, 2, 11});
  inst.edges.push_back({4, 5, 6, 1.0, 2, 4, 1, 3});
  ptn::Line l;
  l.id = 7;
  l.edges = {4};
  l.cost = 2;
  inst.pool.push_back(l);
  ptn::finalize_lines(inst);
  EXPECT_THROW(ptn::derive_turnarounds(inst), DisconnectedPtn);
}

TEST(Ptn, RandomFamilyRespectsItsRegime) {
  for (std::uint32_t seed = 1; seed <= 60; ++seed) {
    const auto inst = ptn::make_random(seed);
    ASSERT_NO_THROW(ptn::validate(inst));
    EXPECT_GE(inst.stops.size(), 4u);
    EXPECT_LE(inst.stops.size(), 6u);
    EXPECT_LE(inst.pool.size(), 6u);
    EXPECT_LE(inst.params.periods.size(), 2u);
    EXPECT_LE(inst.demands().size(), 6u);
    for (const auto& e : inst.edges) {
      EXPECT_GE(e.f_min, 1);
      EXPECT_GE(e.L_drive, 1);
      EXPECT_LE(e.U_drive - e.L_drive, inst.params.T - 1);
    }
    for (const auto& s : inst.stops) {
      EXPECT_GE(s.L_wait, 1);
      EXPECT_GE(s.L_trans, 1);
      EXPECT_LE(s.U_wait - s.L_wait, inst.params.T - 1);
      EXPECT_LE(s.U_trans - s.L_trans, inst.params.T - 1);
    }
    EXPECT_EQ(ptn::make_random(seed), inst);
  }
}
