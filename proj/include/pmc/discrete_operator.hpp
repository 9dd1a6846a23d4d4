#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "pmc/problem.hpp"
#include "pmc/radial_core.hpp"

namespace pmc {

// h(s) = s / sqrt(1+s^2) and its derivatives.
inline double graph_flux(double s) { return s / std::sqrt(1.0 + s * s); }
inline double graph_flux_d1(double s) {
  const double v2 = 1.0 + s * s;
  return 1.0 / (v2 * std::sqrt(v2));
}
inline double graph_flux_d2(double s) {
  const double v2 = 1.0 + s * s;
  return -3.0 * s / (v2 * v2 * std::sqrt(v2));
}

// Rows 0..M-1 of the finite-volume residual; the Dirichlet node u_M = 0 is
// eliminated. Node vectors carry all M+1 entries.
inline std::vector<double> residual(const RadialGrid& grid, const ProblemSpec& spec,
                                    std::span<const double> u, double lambda) {
  const int M = grid.cells();
  std::vector<double> res(M);
  double inner = 0.0;  // A_{i-1/2} h(s_{i-1/2})
  for (int i = 0; i < M; ++i) {
    const double uR = i + 1 == M ? 0.0 : u[i + 1];
    const double outer = grid.area(i) * graph_flux((uR - u[i]) / grid.dr());
    res[i] = -(outer - inner) - grid.volume(i) * (spec.H(grid.node(i)) + lambda * nonlinearity(spec.p, u[i]));
    inner = outer;
  }
  return res;
}

// Flux-form residual norm max_i |sum_{j<=i} res_j| / A_{i+1/2}: the mismatch of
// the flux ratio at the half nodes. Dividing by V_i instead would put the
// rounding floor at eps |u| / dr^2.
inline double residual_norm(const RadialGrid& grid, std::span<const double> res) {
  double m = 0.0, S = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    S += res[i];
    m = std::max(m, std::abs(S) / grid.area(int(i)));
  }
  return m;
}

}  // namespace pmc
