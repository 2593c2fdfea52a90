// transit_cli: generate instances, run solution approaches, report PoS and
// model statistics. Exit codes: 0 success, 1 infeasible or no solution within
// the limits, 2 usage or input error. Errors are printed as a JSON object.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "transit/ean/ean.hpp"
#include "transit/integrated/integrated.hpp"
#include "transit/integrated/validate.hpp"
#include "transit/milp/lp_format.hpp"
#include "transit/milp/stats.hpp"
#include "transit/ptn/generators.hpp"
#include "transit/ptn/io.hpp"

using namespace transit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : Error {
  using Error::Error;
};

struct Config {
  std::string instance;
  std::string generate;
  std::uint32_t seed = 1;
  std::string approach = "seq";
  std::optional<double> lambda1, lambda3, lambda4;
  double time_limit = 600.0;
  double gap_tol = 1e-9;
  long node_limit = 0;
  std::string export_lp;
  std::string out = "out";
  bool no_warm_start = false;
  bool sparsity = false;
};

void add_source(CLI::App* sub, Config& c) {
  sub->add_option("--instance", c.instance, "Instance directory (LinTim-style CSV files)");
  sub->add_option("--generate", c.generate, "Built-in instance: small, toy or random");
  sub->add_option("--seed", c.seed, "Seed for --generate random")->default_val(1);
}

void add_solve_flags(CLI::App* sub, Config& c) {
  sub->add_option("--lambda1", c.lambda1, "Weight of f1 (line cost) in lintimpass");
  sub->add_option("--lambda3", c.lambda3, "Weight of f3 (travel time)");
  sub->add_option("--lambda4", c.lambda4, "Weight of f4 (vehicle cost)");
  sub->add_option("--time-limit", c.time_limit, "Seconds per MILP solve")->default_val(600.0);
  sub->add_option("--gap-tol", c.gap_tol, "Absolute optimality gap tolerance")->default_val(1e-9);
  sub->add_option("--node-limit", c.node_limit, "Branch-and-bound nodes per MILP solve (0: none)")->default_val(0);
  sub->add_flag("--no-warm-start", c.no_warm_start, "Do not seed integrated solves with the sequential solution");
}

ptn::PtnInstance load(const Config& c) {
  if (c.instance.empty() == c.generate.empty()) throw UsageError("give exactly one of --instance and --generate");
  if (!c.instance.empty()) return ptn::load_instance(c.instance);
  if (c.generate == "small") return ptn::make_small();
  if (c.generate == "toy") return ptn::make_toy();
  if (c.generate == "random") return ptn::make_random(c.seed);
  throw UsageError("unknown generator '" + c.generate + "' (expected small, toy or random)");
}

integrated::Lambda lambda(const Config& c, const ptn::PtnInstance& inst) {
  auto l = integrated::Lambda::from(inst);
  if (c.lambda1) l.l1 = *c.lambda1;
  if (c.lambda3) l.l3 = *c.lambda3;
  if (c.lambda4) l.l4 = *c.lambda4;
  try {
    l.check();
  } catch (const ModelError& e) {
    throw UsageError(e.what());
  }
  return l;
}

integrated::ApproachOptions options(const Config& c) {
  integrated::ApproachOptions o;
  o.solve.time_limit = c.time_limit;
  o.solve.gap_tol = c.gap_tol;
  if (c.node_limit > 0) o.solve.node_limit = c.node_limit;
  o.warm_start = !c.no_warm_start;
  return o;
}

integrated::Approach approach(const std::string& name) {
  if (auto a = integrated::parse_approach(name)) return *a;
  throw UsageError("unknown approach '" + name + "' (expected seq, timpass, lintimpass, timveh or full)");
}

std::pair<int, int> range(integrated::Approach a) {
  switch (a) {
    case integrated::Approach::Seq: return {1, 1};
    case integrated::Approach::TimPass: return {2, 3};
    case integrated::Approach::LinTimPass: return {1, 3};
    case integrated::Approach::TimVeh: return {3, 4};
    case integrated::Approach::Full: return {1, 4};
  }
  return {1, 1};
}

void write_json(const fs::path& file, const json& j) {
  std::ofstream os(file);
  if (!os) throw IoError("cannot write " + file.string());
  os << j.dump(2) << '\n';
}

// Objective weights of the solve for stages first..last of approach `a`.
std::vector<double> solve_weights(integrated::Approach a, const integrated::Lambda& lam, int first, int last) {
  if (first == last) {
    std::vector<double> unit(4, 0.0);
    unit[first - 1] = 1.0;
    return unit;
  }
  return {a == integrated::Approach::LinTimPass ? lam.l1 : 0.0, 0.0, lam.l3, lam.l4};
}

// The MILPs solved for a report, rebuilt from its stage values.
std::vector<std::pair<std::string, milp::MilpModel>> models_of(const std::shared_ptr<const ean::Network>& net,
                                                                 integrated::Approach a,
                                                                 const integrated::Lambda& lam,
                                                                 const std::vector<framework::Values>& values,
                                                                 bool integrated_only = false) {
  const auto stages = integrated::transport_stages(net);
  std::vector<std::pair<std::string, milp::MilpModel>> out;
  const auto [k, l] = range(a);
  std::vector<std::pair<int, int>> solves;
  for (int i = 1; i < k && !integrated_only; ++i) solves.emplace_back(i, i);
  solves.emplace_back(k, l);
  for (int i = l + 1; i <= 4 && !integrated_only; ++i) solves.emplace_back(i, i);
  if (k == l) {
    solves.clear();
    for (int i = 1; i <= 4; ++i) solves.emplace_back(i, i);
  }
  for (const auto& [first, last] : solves) {
    const std::vector<framework::Values> prefix(values.begin(), values.begin() + (first - 1));
    auto as = framework::assemble(stages, prefix, first, last, solve_weights(a, lam, first, last));
    out.emplace_back(std::to_string(first) + "-" + std::to_string(last), std::move(as.model));
  }
  return out;
}

// PATH for a single model, PATH with ".<first>-<last>" before the extension otherwise.
void export_models(const std::vector<std::pair<std::string, milp::MilpModel>>& models, const fs::path& path) {
  for (const auto& [name, m] : models) {
    fs::path p = path;
    if (models.size() > 1) p.replace_filename(path.stem().string() + "." + name + path.extension().string());
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    milp::export_lp_file(m, p.string());
    spdlog::info("wrote {}", p.string());
  }
}

std::size_t violations(const ean::Network& n, const integrated::PlanReport& r) {
  return integrated::check_plan(n.inst, r.plan).size() + integrated::check_routing(n, r.plan, r.routing).size() +
         integrated::check_timetable(n, r.plan, r.timetable).size() +
         integrated::check_schedule(n, r.trips, r.schedule).size();
}

json summary(const integrated::PlanReport& r) {
  return {{"approach", r.approach},
          {"f1", r.f1},
          {"f2", r.f2},
          {"f3", r.f3},
          {"f4", r.f4},
          {"total", r.total},
          {"gap", r.gap()}};
}

// ---------------------------------------------------------------------------

int cmd_generate(const Config& c) {
  const auto inst = load(c);
  ptn::save_instance(inst, c.out);
  std::cout << json{{"instance", inst.name},
                    {"stops", inst.stops.size()},
                    {"edges", inst.edges.size()},
                    {"lines", inst.pool.size()},
                    {"od_pairs", inst.od.size()}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_solve(const Config& c) {
  const auto a = approach(c.approach);
  const auto inst = load(c);
  const auto lam = lambda(c, inst);
  const auto net = ean::make_network(inst);
  spdlog::info("solving {} with {} (lambda3={}, lambda4={})", inst.name, c.approach, lam.l3, lam.l4);
  const auto r = integrated::run_approach(net, a, lam, options(c));
  const fs::path out(c.out);
  fs::create_directories(out);
  auto j = integrated::to_json(r);
  j["violations"] = violations(*net, r);
  write_json(out / "report.json", j);
  lin::write_csv(r.plan, out / "lineplan.csv");
  tim::write_csv(r.timetable, out / "timetable.csv", out / "activities.csv");
  pass::write_csv(r.routing, out / "routes.csv");
  veh::write_csv(*net, r.trips, r.schedule, out / "schedule.csv");
  if (!c.export_lp.empty()) export_models(models_of(net, a, lam, r.pipeline.values()), c.export_lp);
  std::cout << summary(r).dump() << '\n';
  return 0;
}

// One row per approach against the full model as reference.
int cmd_pos(const Config& c) {
  const auto inst = load(c);
  const auto lam = lambda(c, inst);
  const auto net = ean::make_network(inst);
  const auto opts = options(c);
  const auto ref = integrated::run_approach(net, integrated::Approach::Full, lam, opts);
  const fs::path out(c.out);
  fs::create_directories(out);
  std::ofstream os(out / "pos.csv");
  if (!os) throw IoError("cannot write " + (out / "pos.csv").string());
  os << "approach;total;pos;gap;reference_total;reference_gap\n";
  json rows = json::array();
  using ptn::csv::num;
  for (auto a : integrated::all_approaches()) {
    auto r = a == integrated::Approach::Full ? ref : integrated::run_approach(net, a, lam, opts);
    integrated::attach_pos(r, ref);
    os << r.approach << ';' << num(r.total) << ';' << (r.pos ? num(*r.pos) : "") << ';' << num(r.gap()) << ';'
       << num(ref.total) << ';' << num(ref.gap()) << '\n';
    json row = summary(r);
    row["pos"] = r.pos ? json(*r.pos) : json(nullptr);
    rows.push_back(row);
  }
  std::cout << json{{"instance", inst.name}, {"reference_gap", ref.gap()}, {"rows", rows}}.dump() << '\n';
  return 0;
}

int cmd_sweep(const Config& c, const std::vector<std::string>& lambdas, const std::vector<std::string>& approaches) {
  const auto inst = load(c);
  const auto net = ean::make_network(inst);
  std::vector<integrated::Lambda> ls;
  for (const auto& s : lambdas) {
    integrated::Lambda l;
    char sep1 = 0, sep2 = 0;
    std::istringstream is(s);
    if (!(is >> l.l1 >> sep1 >> l.l3 >> sep2 >> l.l4) || sep1 != ',' || sep2 != ',' || !is.eof())
      throw UsageError("lambda '" + s + "' is not of the form l1,l3,l4");
    try {
      l.check();
    } catch (const ModelError& e) {
      throw UsageError(e.what());
    }
    ls.push_back(l);
  }
  if (ls.empty()) ls = {{0, 10, 1}, {0, 1, 0}, {0, 0, 1}, {0, 40, 1}};
  std::vector<integrated::Approach> as;
  for (const auto& a : approaches) as.push_back(approach(a));
  if (as.empty()) as = {integrated::Approach::Full};
  const auto reports = integrated::pareto_sweep(net, ls, as, options(c));
  const fs::path out(c.out);
  fs::create_directories(out);
  integrated::write_sweep_csv(reports, out / "sweep.csv");
  json all = json::array();
  for (const auto& r : reports) all.push_back(integrated::to_json(r));
  write_json(out / "sweep.json", all);
  json rows = json::array();
  for (const auto& r : reports) {
    json row = summary(r);
    row["lambda"] = {r.lambda.l1, r.lambda.l3, r.lambda.l4};
    row["dominated"] = r.dominated;
    rows.push_back(row);
  }
  std::cout << rows.dump() << '\n';
  return 0;
}

// Reference sizes of the full model for the built-in data sets of the same name.
std::optional<std::pair<std::size_t, std::size_t>> reference_size(const std::string& name) {
  if (name == "small") return std::pair<std::size_t, std::size_t>{2322, 5033};
  if (name == "toy") return std::pair<std::size_t, std::size_t>{70152, 118060};
  return std::nullopt;
}

int cmd_stats(const Config& c) {
  const auto a = approach(c.approach);
  const auto inst = load(c);
  const auto lam = lambda(c, inst);
  const auto net = ean::make_network(inst);
  const auto [k, l] = range(a);
  // Describes the integrated model, or every stage model for seq; earlier
  // stages are fixed to their sequential values.
  std::vector<framework::Values> values(4);
  if (k > 1 || k == l) {
    integrated::ApproachOptions o = options(c);
    const auto seq = integrated::run_approach(net, integrated::Approach::Seq, lam, o);
    values = seq.pipeline.values();
  }
  const auto models = models_of(net, a, lam, values, true);
  const fs::path out(c.out);
  fs::create_directories(out);
  std::ofstream os(out / "stats.csv");
  if (!os) throw IoError("cannot write " + (out / "stats.csv").string());
  os << "model;block;variables;constraints\n";
  json js = json::array();
  for (const auto& [name, m] : models) {
    const auto st = milp::model_stats(m);
    for (const auto& b : st.blocks) os << name << ';' << b.tag << ';' << b.vars << ';' << b.cons << '\n';
    os << name << ";total;" << st.total_vars << ';' << st.total_cons << '\n';
    json e = milp::to_json(st);
    e["model"] = name;
    if (name == "1-4") {
      if (auto ref = reference_size(inst.name)) e["reference"] = {{"vars", ref->first}, {"cons", ref->second}};
    }
    js.push_back(e);
    if (c.sparsity) {
      std::ofstream sp(out / ("sparsity." + name + ".csv"));
      if (!sp) throw IoError("cannot write sparsity file");
      sp << "row;col\n";
      for (const auto& [r, col] : milp::sparsity(m)) sp << r << ';' << col << '\n';
    }
  }
  write_json(out / "stats.json", js);
  std::cout << json{{"instance", inst.name}, {"approach", c.approach}, {"models", js}}.dump() << '\n';
  return 0;
}

int cmd_ean(const Config& c) {
  const auto inst = load(c);
  const auto net = ean::make_network(inst);
  ean::write_csv(net->net, c.out);
  std::cout << json{{"instance", inst.name},
                    {"events", net->net.events.size()},
                    {"activities", net->net.activities.size()},
                    {"base_events", net->base_events},
                    {"base_activities", net->base_activities}}
                   .dump()
            << '\n';
  return 0;
}

int fail(int code, const std::string& type, const std::string& message) {
  std::cout << json{{"error", {{"type", type}, {"message", message}}}}.dump() << '\n';
  return code;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("transit");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("TRANSIT_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Integrated and sequential public transport planning"};
  app.require_subcommand(1);
  Config c;

  auto* gen = app.add_subcommand("generate", "Write a built-in instance as CSV files");
  add_source(gen, c);
  gen->add_option("name", c.generate, "small, toy or random");
  gen->add_option("--out", c.out, "Output directory")->required();

  auto* solve = app.add_subcommand("solve", "Run one solution approach");
  add_source(solve, c);
  add_solve_flags(solve, c);
  solve->add_option("--approach", c.approach, "seq, timpass, lintimpass, timveh or full")->default_val("seq");
  solve->add_option("--export-lp", c.export_lp, "Write the solved MILPs in LP format");
  solve->add_option("--out", c.out, "Output directory")->default_val("out");

  auto* pos = app.add_subcommand("pos", "Price of sequentiality of every approach against the full model");
  add_source(pos, c);
  add_solve_flags(pos, c);
  pos->add_option("--out", c.out, "Output directory")->default_val("out");

  std::vector<std::string> lambdas, approaches;
  auto* sweep = app.add_subcommand("sweep", "Weighted-sum sweep over lambda");
  add_source(sweep, c);
  add_solve_flags(sweep, c);
  sweep->add_option("--lambda", lambdas, "Weights l1,l3,l4 (repeatable)");
  sweep->add_option("--approaches", approaches, "Approaches to run (default full)");
  sweep->add_option("--out", c.out, "Output directory")->default_val("out");

  auto* stats = app.add_subcommand("stats", "Variable and constraint counts per block");
  add_source(stats, c);
  add_solve_flags(stats, c);
  stats->add_option("--approach", c.approach, "Model to describe")->default_val("full");
  stats->add_flag("--sparsity", c.sparsity, "Also write the nonzero pattern");
  stats->add_option("--out", c.out, "Output directory")->default_val("out");

  auto* ean_cmd = app.add_subcommand("ean", "Write the extended event-activity network");
  add_source(ean_cmd, c);
  ean_cmd->add_option("--out", c.out, "Output directory")->default_val("out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "usage", e.what());
  }

  try {
    if (*gen) return cmd_generate(c);
    if (*solve) return cmd_solve(c);
    if (*pos) return cmd_pos(c);
    if (*sweep) return cmd_sweep(c, lambdas, approaches);
    if (*stats) return cmd_stats(c);
    if (*ean_cmd) return cmd_ean(c);
  } catch (const UsageError& e) {
    return fail(2, "usage", e.what());
  } catch (const StageInfeasible& e) {
    return fail(1, "stage_infeasible", e.what());
  } catch (const IntegrationInfeasible& e) {
    return fail(1, "integration_infeasible", e.what());
  } catch (const SolveLimit& e) {
    return fail(1, "solve_limit", e.what());
  } catch (const Infeasible& e) {
    return fail(1, "infeasible", e.what());
  } catch (const Unroutable& e) {
    return fail(1, "unroutable", e.what());
  } catch (const ParseError& e) {
    return fail(2, "parse", e.what());
  } catch (const ValidationError& e) {
    return fail(2, "validation", e.what());
  } catch (const IoError& e) {
    return fail(2, "io", e.what());
  } catch (const Error& e) {
    return fail(1, "error", e.what());
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what());
  }
  return 2;
}
