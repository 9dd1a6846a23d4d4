#pragma once

#include <vector>

#include "pmc/problem.hpp"
#include "pmc/radial_core.hpp"

namespace pmc {

// Solution of the problem at lambda = 0; every minimal solution lies above it.
inline Profile lower_solution(const ProblemSpec& spec, const RadialGrid& grid) {
  return solve_prescribed(grid, sample(grid, spec.H));
}

inline double weighted_integral(const RadialGrid& grid, std::span<const double> g) {
  double s = 0.0;
  for (int i = 0; i <= grid.cells(); ++i) s += grid.volume(i) * g[i];
  return s;
}

// [P(B_R) - int H] / int u_lower, angular factor cancelled.
inline double apriori_lambda_bound(const ProblemSpec& spec, const RadialGrid& grid) {
  const Profile ul = lower_solution(spec, grid);
  const std::vector<double> h = sample(grid, spec.H);
  return (grid.boundary_area() - weighted_integral(grid, h)) / weighted_integral(grid, ul.u);
}

}  // namespace pmc
