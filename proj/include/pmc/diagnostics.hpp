#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pmc/apriori_bound.hpp"
#include "pmc/errors.hpp"
#include "pmc/problem.hpp"
#include "pmc/radial_core.hpp"

namespace pmc {

inline std::vector<double> total_rhs(const RadialGrid& grid, const ProblemSpec& spec, std::span<const double> u,
                                     double lambda) {
  std::vector<double> g(grid.cells() + 1);
  for (int i = 0; i <= grid.cells(); ++i) g[i] = spec.H(grid.node(i)) + lambda * nonlinearity(spec.p, u[i]);
  return g;
}

// min over r_i > 0 of 1 - q_i for the full right-hand side.
inline double ball_necessary_condition(const RadialGrid& grid, const Profile& pr, double lambda,
                                       const ProblemSpec& spec) {
  const std::vector<double> q = flux_ratio(grid, total_rhs(grid, spec, pr.u, lambda));
  double m = 1.0;
  for (int i = 1; i <= grid.cells(); ++i) m = std::min(m, 1.0 - q[i]);
  return m;
}

inline bool lower_bound_ok(const Profile& pr, const Profile& lower, double tol = 1e-12) {
  for (std::size_t i = 0; i < pr.u.size(); ++i)
    if (pr.u[i] < lower.u[i] - tol) return false;
  return true;
}

struct OriginGradient {
  double r1 = 0.0;
  double C1 = 0.0;
  bool ok = false;
  double max_slope = 0.0;  // over half nodes inside r1
};

inline OriginGradient origin_gradient_check(const RadialGrid& grid, const Profile& pr, double lambda,
                                            const ProblemSpec& spec) {
  double hmax = 0.0;
  for (int i = 0; i <= grid.cells(); ++i) hmax = std::max(hmax, spec.H(grid.node(i)));
  const double S = pr.sup_norm();
  const double load = hmax + lambda * std::pow(S, spec.p);
  OriginGradient og;
  og.r1 = std::min(spec.R, double(spec.n) / (2.0 * load));
  og.C1 = 1.0 / std::sqrt(3.0);
  for (int i = 0; i < grid.cells() && grid.half_node(i) <= og.r1; ++i)
    og.max_slope = std::max(og.max_slope, std::abs(pr.slope[i]));
  og.ok = og.max_slope <= og.C1 + 1e-9;
  return og;
}

struct BarrierReport {
  bool ok = false;
  double eps = 0.0;
  double delta = 0.0;
  double extent = 0.0;     // horizontal extent of the barrier arc
  double slope_cap = 0.0;  // |h'(R)|
  double boundary_slope = 0.0;
};

// Circle of radius 1/eps through (R, 0) rising to height delta over the
// distance extent; the profile must stay below it near the boundary.
inline BarrierReport boundary_barrier_check(const ProblemSpec& spec, const RadialGrid& grid, const Profile& pr,
                                            double lambda) {
  if (!check_admissibility(spec).boundary_strict_ok)
    throw PreconditionError("boundary_barrier_check: strict boundary curvature condition fails");
  const double k = double(spec.n - 1) / spec.R;
  BarrierReport br;
  double best = -1.0;
  for (int a = 0; a <= 12; ++a) {
    const double eps = spec.eps0 * k / 4.0 * std::ldexp(1.0, -a);
    for (int b = 0; b <= 12; ++b) {
      const double delta = std::ldexp(1.0, -b);
      const double ed = eps * delta;
      if (ed > 1.0) continue;
      if (eps + lambda * std::pow(delta, spec.p) + k * ed * ed < k * spec.eps0 && ed > best) {
        best = ed;
        br.eps = eps;
        br.delta = delta;
      }
    }
  }
  if (best < 0.0) throw BarrierUnavailable("boundary_barrier_check: no lattice pair satisfies the barrier inequality");
  const double rho = 1.0 / br.eps;
  const double centre = spec.R + std::sqrt(rho * rho - br.delta * br.delta);
  br.extent = rho - std::sqrt(rho * rho - br.delta * br.delta);
  br.slope_cap = std::sqrt(1.0 - best * best) / best;
  br.boundary_slope = std::abs(pr.slope.back());
  br.ok = true;
  for (int i = grid.cells(); i >= 0 && grid.node(i) >= spec.R - br.extent; --i) {
    const double d = grid.node(i) - centre;
    const double h = br.delta - std::sqrt(std::max(0.0, rho * rho - d * d));
    if (pr.u[i] > h + 1e-9) br.ok = false;
  }
  return br;
}

// Max-norm residual of the equation satisfied by v = sqrt(1 + u_r^2), at half
// nodes 3..M-4. u_rr comes from the non-divergence form of the equation.
inline double v_equation_residual(const RadialGrid& grid, const Profile& pr, double lambda, const ProblemSpec& spec) {
  const int M = grid.cells(), n = spec.n;
  const double dr = grid.dr();
  std::vector<double> v(M);
  for (int j = 0; j < M; ++j) v[j] = std::sqrt(1.0 + pr.slope[j] * pr.slope[j]);
  auto node_flux = [&](int i) {
    const double vi = 0.5 * (v[i - 1] + v[i]);
    // v_i - v_{i-1} without cancellation against the leading 1
    const double dv = (pr.slope[i] - pr.slope[i - 1]) * (pr.slope[i] + pr.slope[i - 1]) / (v[i] + v[i - 1]);
    return std::pow(grid.node(i), n - 1) * dv / dr / (vi * vi * vi);
  };
  double worst = 0.0;
  for (int j = 3; j <= M - 4; ++j) {
    const double r = grid.half_node(j);
    const double s = pr.slope[j];
    const double vj = v[j];
    const double u = 0.5 * (pr.u[j] + pr.u[j + 1]);
    const double div = -(node_flux(j + 1) - node_flux(j)) / dr / std::pow(r, n - 1);
    const double urr_v3 = -spec.H(r) - lambda * nonlinearity(spec.p, u) - double(n - 1) * s / (r * vj);
    const double c2 = double(n - 1) / (r * r) * s * s / (vj * vj) + urr_v3 * urr_v3;
    const double rhs = spec.H.derivative(r) * s / vj + lambda * nonlinearity_d1(spec.p, u) * s * s / vj;
    worst = std::max(worst, std::abs(div + c2 - rhs));
  }
  return worst;
}

struct BlowupRow {
  double lambda = 0.0;
  double sup_slope = 0.0;
  double scaled = 0.0;  // (lambda* - lambda) sup|u_r|
};

inline std::vector<BlowupRow> gradient_blowup_monitor(std::span<const double> lambdas,
                                                      std::span<const Profile> profiles, double lambda_star) {
  std::vector<BlowupRow> rows;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    BlowupRow r;
    r.lambda = lambdas[k];
    r.sup_slope = profiles[k].sup_slope();
    r.scaled = (lambda_star - r.lambda) * r.sup_slope;
    rows.push_back(r);
  }
  return rows;
}

struct DiagnosticsReport {
  double lambda = 0.0;
  double ball_condition_margin = 0.0;
  double apriori_lambda_bound = 0.0;
  bool lower_bound_ok = false;
  OriginGradient origin_gradient;
  double boundary_slope = 0.0;
  std::optional<BarrierReport> barrier;  // empty when the strict boundary condition fails
  std::string barrier_status;
  bool barrier_ok = false;
  double v_equation_residual = 0.0;
  double bv_norm = 0.0;
  double sup_norm = 0.0;
};

inline DiagnosticsReport analyze_profile(const ProblemSpec& spec, const RadialGrid& grid, const Profile& pr,
                                         double lambda) {
  DiagnosticsReport d;
  d.lambda = lambda;
  d.ball_condition_margin = ball_necessary_condition(grid, pr, lambda, spec);
  d.apriori_lambda_bound = apriori_lambda_bound(spec, grid);
  d.lower_bound_ok = lower_bound_ok(pr, lower_solution(spec, grid));
  d.origin_gradient = origin_gradient_check(grid, pr, lambda, spec);
  d.boundary_slope = std::abs(pr.slope.back());
  try {
    d.barrier = boundary_barrier_check(spec, grid, pr, lambda);
    d.barrier_ok = d.barrier->ok;
    d.barrier_status = d.barrier_ok ? "ok" : "violated";
  } catch (const PreconditionError&) {
    d.barrier_status = "not applicable";
  } catch (const BarrierUnavailable&) {
    d.barrier_status = "unavailable";
  }
  d.v_equation_residual = v_equation_residual(grid, pr, lambda, spec);
  d.bv_norm = bv_norm(grid, pr.slope);
  d.sup_norm = pr.sup_norm();
  return d;
}

}  // namespace pmc
