#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "transit/error.hpp"
#include "transit/framework/pipeline.hpp"

namespace transit::framework {

// Relative excess of a candidate value over the optimum.
inline double pos(double f_candidate, double f_optimal) {
  if (!(f_optimal > 0.0)) throw NonpositiveOptimal();
  return (f_candidate - f_optimal) / f_optimal;
}

// Largest single-objective PoS among stages with positive weight.
inline double pos_bound_weighted(const std::vector<double>& per_objective_pos, const Weights& weights) {
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < per_objective_pos.size() && i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    best = std::max(best, per_objective_pos[i]);
    any = true;
  }
  if (!any) throw EmptyIndexSet();
  return best;
}

}  // namespace transit::framework
