#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>

#include "transit/ean/network.hpp"
#include "transit/error.hpp"
#include "transit/framework/stage.hpp"
#include "transit/milp/solver.hpp"

namespace transit::lin {

using framework::Block;
using framework::Values;
using milp::LinExpr;
using milp::MilpModel;
using milp::Sense;

struct LinePlan {
  std::map<int, int> chosen;  // line id -> y_l
  double cost = 0.0;

  std::set<int> lines() const {
    std::set<int> s;
    for (const auto& [l, y] : chosen)
      if (y) s.insert(l);
    return s;
  }
};

inline LinePlan to_plan(const ptn::PtnInstance& inst, const Values& y) {
  LinePlan p;
  for (std::size_t i = 0; i < inst.pool.size(); ++i) {
    const int v = static_cast<int>(std::lround(y.at(i)));
    p.chosen[inst.pool[i].id] = v;
    p.cost += v * inst.pool[i].cost;
  }
  return p;
}

// One binary y_l per pool line, in pool order.
inline Block declare_lin(const ptn::PtnInstance& inst, MilpModel& m) {
  Block y;
  for (const auto& l : inst.pool) y.emplace_back(m.add_binary("y_" + std::to_string(l.id)));
  return y;
}

// f_min(e) <= sum of y_l over lines through e <= f_max(e).
inline void constrain_lin(const ptn::PtnInstance& inst, MilpModel& m, const Block& y) {
  for (const auto& e : inst.edges) {
    LinExpr load;
    for (std::size_t i = 0; i < inst.pool.size(); ++i)
      for (int x : inst.pool[i].edges)
        if (x == e.id) load += y[i];
    m.add_constraint(load, Sense::GreaterEqual, e.f_min, "lin_L1_e" + std::to_string(e.id));
    m.add_constraint(load, Sense::LessEqual, e.f_max, "lin_L2_e" + std::to_string(e.id));
  }
}

inline LinExpr objective_lin(const ptn::PtnInstance& inst, const Block& y) {
  LinExpr f;
  for (std::size_t i = 0; i < inst.pool.size(); ++i) f += y[i] * inst.pool[i].cost;
  return f;
}

struct LinBlock {
  Block y;
  LinExpr objective;
};

inline LinBlock build_lin(const ptn::PtnInstance& inst, MilpModel& m) {
  LinBlock b;
  b.y = declare_lin(inst, m);
  constrain_lin(inst, m, b.y);
  b.objective = objective_lin(inst, b.y);
  return b;
}

inline LinePlan solve_lin(const ptn::PtnInstance& inst) {
  MilpModel m;
  auto b = build_lin(inst, m);
  m.set_objective(b.objective);
  m.freeze();
  const auto sol = milp::solve(m);
  if (!sol.has_solution()) throw Infeasible("line planning: frequency bounds cannot be met by the pool");
  return to_plan(inst, framework::block_values(b.y, sol.assignment));
}

class LinStage : public framework::Stage {
 public:
  explicit LinStage(std::shared_ptr<const ean::Network> net) : net_(std::move(net)) {}
  std::string name() const override { return "lin"; }
  Block declare(MilpModel& m) const override { return declare_lin(net_->inst, m); }
  void constrain(MilpModel& m, const std::vector<Block>&, const Block& own) const override {
    constrain_lin(net_->inst, m, own);
  }
  LinExpr objective(MilpModel&, const std::vector<Block>&, const Block& own) const override {
    return objective_lin(net_->inst, own);
  }
  double evaluate(const std::vector<Values>& blocks) const override { return to_plan(net_->inst, blocks[0]).cost; }

 private:
  std::shared_ptr<const ean::Network> net_;
};

inline void write_csv(const LinePlan& p, const std::filesystem::path& file) {
  std::ofstream os(file);
  if (!os) throw IoError("cannot write " + file.string());
  os << "line_id;chosen\n";
  for (const auto& [l, y] : p.chosen) os << l << ';' << y << '\n';
}

}  // namespace transit::lin
