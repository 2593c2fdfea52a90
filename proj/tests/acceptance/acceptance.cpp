// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: transit_acceptance [path/to/transit_cli]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "support/random_milp.hpp"
#include "transit/framework/fixtures.hpp"
#include "transit/framework/pipeline.hpp"
#include "transit/framework/pos.hpp"
#include "transit/integrated/integrated.hpp"
#include "transit/integrated/validate.hpp"
#include "transit/milp/solver.hpp"
#include "transit/ptn/generators.hpp"
#include "transit/ptn/io.hpp"

using namespace transit;
namespace fs = std::filesystem;
using integrated::Approach;
using integrated::Lambda;
using integrated::PlanReport;

namespace {

constexpr double kTol = 1e-6;
constexpr std::uint32_t kRandomInstances = 20;
constexpr double kFullLimit = 60.0;

struct Check {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& msg) {
    if (!cond) {
      if (!ok) why << "; ";
      why << msg;
      ok = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Validator findings across every report produced by the suite.
std::vector<std::string> g_violations;
int g_validated = 0;

void validate(const ean::Network& n, const PlanReport& r, const std::string& tag) {
  auto add = [&](const std::vector<std::string>& v) {
    for (const auto& s : v) g_violations.push_back(tag + ": " + s);
  };
  add(integrated::check_plan(n.inst, r.plan));
  add(integrated::check_routing(n, r.plan, r.routing));
  add(integrated::check_timetable(n, r.plan, r.timetable));
  add(integrated::check_schedule(n, r.trips, r.schedule));
  ++g_validated;
}

integrated::ApproachOptions exact(double limit = kFullLimit, bool warm = false) {
  integrated::ApproachOptions o;
  o.solve.time_limit = limit;
  o.warm_start = warm;
  return o;
}

bool optimal(const PlanReport& r) {
  for (const auto& s : r.pipeline.solves)
    if (s.status != milp::SolveStatus::Optimal) return false;
  return true;
}

std::string tag(std::uint32_t seed, const std::string& what) { return "random-" + std::to_string(seed) + " " + what; }

// ---------------------------------------------------------------------------

Check two_stage_pos() {
  Check c;
  for (double n : {2.0, 10.0, 100.0}) {
    const auto t0 = Clock::now();
    const auto stages = framework::two_stage_lp(n);
    const framework::Weights w({1, 1});
    const auto seq = framework::run_sequential(stages, w);
    const auto msp = framework::run_integrated(stages, w, 1, 2);
    const double p = framework::pos(seq.total, msp.total);
    const double dt = seconds_since(t0);
    const std::string at = "N=" + fmt(n) + ": ";
    c.expect(std::abs(seq.total - 1.0) <= kTol, at + "sequential total " + fmt(seq.total));
    c.expect(std::abs(msp.total - 1.0 / n) <= kTol, at + "integrated total " + fmt(msp.total));
    c.expect(std::abs(p - (n - 1.0)) <= kTol, at + "PoS " + fmt(p));
    c.expect(dt < 1.0, at + "took " + fmt(dt) + " s");
  }
  return c;
}

Check three_stage_partial() {
  Check c;
  const double n = 10.0;
  const auto stages = framework::three_stage_lp(n);
  const framework::Weights w({1, 1, 1});
  const auto seq = framework::run_sequential(stages, w);
  const auto p12 = framework::run_integrated(stages, w, 1, 2);
  const auto msp = framework::run_integrated(stages, w, 1, 3);
  const std::vector<double> xbar{0, 1, 0}, xp{0.1, 0, 10};
  for (std::size_t i = 0; i < 3; ++i) {
    c.expect(std::abs(seq.stages[i].values[0] - xbar[i]) <= kTol, "sequential x" + std::to_string(i + 1));
    c.expect(std::abs(p12.stages[i].values[0] - xp[i]) <= kTol, "partial x" + std::to_string(i + 1));
  }
  c.expect(std::abs(seq.total - 1.0) <= kTol, "sequential total " + fmt(seq.total));
  c.expect(std::abs(p12.total - 10.1) <= kTol, "partial total " + fmt(p12.total));
  c.expect(std::abs(msp.total - 1.0) <= kTol, "integrated total " + fmt(msp.total));
  // PoS_{1,2} = (f(partial) - f(x*)) / f(x*).
  const double p = framework::pos(p12.total, msp.total);
  c.expect(std::abs(p - 10.1) <= kTol, "PoS_{1,2} = " + fmt(p) + ", expected 10.1");
  return c;
}

struct RandomRun {
  std::uint32_t seed = 0;
  PlanReport seq, int24, int34, full;
  double full_seconds = 0.0;
};

std::vector<RandomRun>& random_runs() {
  static std::vector<RandomRun> runs = [] {
    std::vector<RandomRun> out;
    for (std::uint32_t seed = 1; seed <= kRandomInstances; ++seed) {
      const auto net = ean::make_network(ptn::make_random(seed));
      const auto lam = Lambda::from(net->inst);
      RandomRun r;
      r.seed = seed;
      r.seq = integrated::run_approach(net, Approach::Seq, lam, exact());
      r.int34 = integrated::run_range(net, 3, 4, lam, exact());
      r.int24 = integrated::run_range(net, 2, 4, lam, exact());
      const auto t0 = Clock::now();
      r.full = integrated::run_approach(net, Approach::Full, lam, exact());
      r.full_seconds = seconds_since(t0);
      validate(*net, r.seq, tag(seed, "seq"));
      validate(*net, r.int34, tag(seed, "int(3..4)"));
      validate(*net, r.int24, tag(seed, "int(2..4)"));
      validate(*net, r.full, tag(seed, "full"));
      out.push_back(std::move(r));
    }
    return out;
  }();
  return runs;
}

bool in_regime(const ptn::PtnInstance& inst) {
  return inst.stops.size() >= 4 && inst.stops.size() <= 6 && inst.pool.size() <= 6 &&
         inst.params.periods.size() <= 2 && inst.demands().size() <= 6;
}

Check integration_never_worse() {
  Check c;
  double slowest = 0.0;
  for (const auto& r : random_runs()) {
    const std::string at = "seed " + std::to_string(r.seed) + ": ";
    c.expect(in_regime(ptn::make_random(r.seed)), at + "instance outside the random regime");
    c.expect(optimal(r.full), at + "full solve not optimal");
    c.expect(r.full.total <= r.seq.total + kTol, at + "full " + fmt(r.full.total) + " > seq " + fmt(r.seq.total));
    c.expect(r.full_seconds <= kFullLimit, at + "full took " + fmt(r.full_seconds) + " s");
    slowest = std::max(slowest, r.full_seconds);
  }
  if (c.ok) c.why << random_runs().size() << " instances, slowest full solve " << fmt(slowest) << " s";
  return c;
}

Check suffix_chain() {
  Check c;
  for (const auto& r : random_runs()) {
    const std::string at = "seed " + std::to_string(r.seed) + ": ";
    c.expect(optimal(r.int24) && optimal(r.int34), at + "partial solve not optimal");
    c.expect(r.full.total <= r.int24.total + kTol, at + "Int(1..4) > Int(2..4)");
    c.expect(r.int24.total <= r.int34.total + kTol, at + "Int(2..4) > Int(3..4)");
    c.expect(r.int34.total <= r.seq.total + kTol, at + "Int(3..4) > seq");
  }
  if (c.ok) c.why << random_runs().size() << " instances";
  return c;
}

// PoS of seq against full under `lam`; the instance may be adjusted first.
// The full solve starts from the sequential solution: with a vehicle-count
// objective a cold dive can miss every feasible point within the limit.
Check pos_bound(const Lambda& lam, const std::function<void(ptn::PtnInstance&)>& adjust,
                const std::function<double(const ptn::PtnInstance&)>& bound, const std::string& what) {
  Check c;
  double worst = 0.0;
  for (std::uint32_t seed = 1; seed <= kRandomInstances; ++seed) {
    auto inst = ptn::make_random(seed);
    adjust(inst);
    const auto net = ean::make_network(inst);
    const std::string at = "seed " + std::to_string(seed) + ": ";
    const auto seq = integrated::run_approach(net, Approach::Seq, lam, exact());
    const auto full = integrated::run_approach(net, Approach::Full, lam, exact(kFullLimit, true));
    validate(*net, seq, tag(seed, what + " seq"));
    validate(*net, full, tag(seed, what + " full"));
    c.expect(optimal(full), at + "full solve not optimal");
    if (!(full.total > 0.0)) {
      c.expect(false, at + "integrated optimum is not positive");
      continue;
    }
    const double p = framework::pos(seq.total, full.total);
    const double b = bound(inst);
    worst = std::max(worst, p);
    c.expect(p <= b + kTol, at + "PoS " + fmt(p) + " above bound " + fmt(b));
  }
  if (c.ok) c.why << "largest PoS " << fmt(worst);
  return c;
}

Check travel_time_bound() {
  return pos_bound(
      Lambda{0, 1, 0}, [](ptn::PtnInstance&) {},
      [](const ptn::PtnInstance& inst) {
        double b = inst.params.T - 1;
        for (const auto& s : inst.stops) b = std::max({b, double(s.U_trans), double(s.U_wait)});
        return b;
      },
      "travel-time");
}

Check vehicle_bound() {
  return pos_bound(
      Lambda{0, 0, 1}, [](ptn::PtnInstance& inst) { inst.params.gamma = {0, 0, 0, 0, 1}; },
      [](const ptn::PtnInstance& inst) { return double(inst.pool.size() * inst.params.periods.size()) - 1.0; },
      "vehicles");
}

Check oracles() {
  Check c;
  for (const auto& r : random_runs()) {
    const auto net = ean::make_network(ptn::make_random(r.seed));
    const double milp_f2 = r.seq.pipeline.solves.at(1).objective;
    const double oracle_f2 = pass::route_oracle(*net, r.seq.plan.lines()).f2;
    c.expect(std::abs(milp_f2 - oracle_f2) <= kTol,
             "seed " + std::to_string(r.seed) + ": routing MILP " + fmt(milp_f2) + " vs oracle " + fmt(oracle_f2));
  }
  int infeasible = 0;
  for (std::uint32_t seed = 1; seed <= 50; ++seed) {
    const int ints = 4 + static_cast<int>(seed % 9);  // 4..12
    const auto m = fixtures::random_milp(1000 + seed, ints, static_cast<int>(seed % 3), 3 + static_cast<int>(seed % 5));
    const auto bb = milp::solve(m);
    const auto bf = milp::solve_bruteforce(m);
    const std::string at = "milp " + std::to_string(seed) + ": ";
    c.expect(bb.status == bf.status, at + "status " + milp::to_string(bb.status) + " vs " + milp::to_string(bf.status));
    if (bf.status == milp::SolveStatus::Infeasible) ++infeasible;
    else if (bb.has_solution() && bf.has_solution())
      c.expect(std::abs(bb.objective - bf.objective) <= kTol,
               at + "objective " + fmt(bb.objective) + " vs " + fmt(bf.objective));
  }
  if (c.ok) c.why << random_runs().size() << " routings, 50 MILPs (" << infeasible << " infeasible)";
  return c;
}

Check feasibility_invariants() {
  // The reports of the other criteria are validated as they are produced;
  // add the two fixed instances.
  for (const auto& inst : {ptn::make_small(), ptn::make_random(kRandomInstances + 1)}) {
    const auto net = ean::make_network(inst);
    const auto lam = Lambda::from(inst);
    for (Approach a : {Approach::Seq, Approach::TimPass, Approach::TimVeh}) {
      const auto r = integrated::run_approach(net, a, lam, exact(30));
      validate(*net, r, inst.name + " " + r.approach);
    }
  }
  Check c;
  for (std::size_t i = 0; i < std::min<std::size_t>(g_violations.size(), 5); ++i) c.expect(false, g_violations[i]);
  if (c.ok) c.why << g_validated << " reports, 0 violations";
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// Every regular file in `a` exists in `b` with the same bytes, and vice versa.
bool same_tree(const fs::path& a, const fs::path& b, std::string& diff) {
  std::vector<fs::path> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) fa.push_back(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) fb.push_back(fs::relative(e.path(), b));
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) {
    diff = "file sets differ";
    return false;
  }
  for (const auto& f : fa)
    if (slurp(a / f) != slurp(b / f)) {
      diff = f.string();
      return false;
    }
  return !fa.empty() || (diff = "no files", false);
}

Check determinism(const char* cli) {
  Check c;
  // Library reports.
  for (std::uint32_t seed : {1u, 7u}) {
    const auto net = ean::make_network(ptn::make_random(seed));
    const auto lam = Lambda::from(net->inst);
    for (Approach a : integrated::all_approaches()) {
      const auto x = integrated::to_json(integrated::run_approach(net, a, lam, exact())).dump(2);
      const auto y = integrated::to_json(integrated::run_approach(net, a, lam, exact())).dump(2);
      c.expect(x == y, "seed " + std::to_string(seed) + " " + integrated::to_string(a) + " report differs");
    }
  }
  int commands = 0;
  if (cli) {
    const fs::path root = fs::temp_directory_path() / "transit_acceptance_det";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::vector<std::pair<std::string, std::string>> cmds{
        {"generate-small", "generate small --out {}"},
        {"generate-random", "generate random --seed 5 --out {}"},
        {"solve-seq", "solve --generate small --approach seq --out {}"},
        {"solve-full", "solve --generate random --seed 3 --approach full --no-warm-start --out {}"},
        {"solve-timveh", "solve --generate small --approach timveh --node-limit 200 --out {}"},
        {"pos", "pos --generate random --seed 2 --out {}"},
        {"stats", "stats --generate small --out {}"},
        {"ean", "ean --generate small --out {}"},
    };
    for (const auto& [name, args] : cmds) {
      std::string diff;
      fs::path dirs[2] = {root / (name + "_a"), root / (name + "_b")};
      bool ran = true;
      for (const auto& d : dirs) {
        std::string a = args;
        a.replace(a.find("{}"), 2, d.string());
        const std::string cmd = std::string("\"") + cli + "\" " + a + " > \"" + d.string() + ".stdout\" 2>/dev/null";
        ran = ran && std::system(cmd.c_str()) == 0;
      }
      c.expect(ran, name + ": command failed");
      if (ran) {
        c.expect(same_tree(dirs[0], dirs[1], diff), name + ": " + diff);
        c.expect(slurp(dirs[0].string() + ".stdout") == slurp(dirs[1].string() + ".stdout"), name + ": stdout differs");
      }
      ++commands;
    }
  }
  if (c.ok) c.why << "library reports for 2 instances x 5 approaches; " << commands << " CLI commands";
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  struct Criterion {
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {"pos_unbounded_two_stage_lp", two_stage_pos},
      {"partial_integration_three_stage_lp", three_stage_partial},
      {"integration_never_worse", integration_never_worse},
      {"suffix_integration_chain", suffix_chain},
      {"travel_time_pos_bound", travel_time_bound},
      {"vehicle_count_pos_bound", vehicle_bound},
      {"oracle_equivalences", oracles},
      {"feasibility_invariants", feasibility_invariants},
      {"determinism", [cli] { return determinism(cli); }},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = Clock::now();
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    failed += !c.ok;
    std::printf("%s %s (%.1f s)%s%s\n", c.ok ? "PASS" : "FAIL", cr.name, seconds_since(t0),
                c.why.str().empty() ? "" : ": ", c.why.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed ? 1 : 0;
}
