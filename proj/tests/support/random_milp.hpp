#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "transit/milp/model.hpp"

namespace transit::fixtures {

// Small random MILP with a known feasible point (the constraints are built
// around one). Integer variables first, then continuous.
inline milp::MilpModel random_milp(std::uint32_t seed, int num_int, int num_cont, int num_cons) {
  std::mt19937 rng(seed);
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint32_t>(hi - lo + 1)); };
  milp::MilpModel m;
  std::vector<milp::VarId> vars;
  std::vector<double> point;
  for (int i = 0; i < num_int; ++i) {
    if (pick(0, 2) == 0) {
      const int lo = pick(-2, 0), hi = pick(1, 3);
      vars.push_back(m.add_integer("i" + std::to_string(i), lo, hi));
      point.push_back(pick(lo, hi));
    } else {
      vars.push_back(m.add_binary("b" + std::to_string(i)));
      point.push_back(pick(0, 1));
    }
  }
  for (int i = 0; i < num_cont; ++i) {
    vars.push_back(m.add_continuous("c" + std::to_string(i), 0.0, pick(1, 6)));
    point.push_back(pick(0, 2) * 0.5);
  }
  for (int r = 0; r < num_cons; ++r) {
    milp::LinExpr e;
    double act = 0.0;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (pick(0, 1) == 0) continue;
      const int a = pick(-5, 5);
      e.add(vars[j], a);
      act += a * point[j];
    }
    const int kind = pick(0, 4);
    const auto sense = kind == 0 ? milp::Sense::GreaterEqual : milp::Sense::LessEqual;
    const double slack = pick(0, 3);
    const double rhs = sense == milp::Sense::LessEqual ? act + slack : act - slack;
    m.add_constraint(e, sense, rhs, "r" + std::to_string(r));
  }
  milp::LinExpr obj;
  for (std::size_t j = 0; j < vars.size(); ++j) obj.add(vars[j], pick(-6, 6) + (j >= static_cast<std::size_t>(num_int) ? 0.25 : 0.0));
  m.set_objective(obj);
  m.freeze();
  return m;
}

}  // namespace transit::fixtures
