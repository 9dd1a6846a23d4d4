#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "pmc/discrete_operator.hpp"
#include "pmc/errors.hpp"
#include "pmc/problem.hpp"
#include "pmc/radial_core.hpp"
#include "pmc/tridiagonal.hpp"

namespace pmc {

// Radial form of the second variation: |grad phi|^2/v - (grad phi . grad u)^2/v^3
// collapses to phi_r^2 / v^3 with v = sqrt(1 + u_r^2).
inline double reduced_gradient_weight(double s) { return graph_flux_d1(s); }

// Stiffness minus potential against the weights V_i, unknowns 0..M-1.
struct SturmLiouvilleOperator {
  double dr = 0.0;
  std::vector<double> conductivity;  // k_{i+1/2} = A_{i+1/2} h'(s_{i+1/2}), i = 0..M-1
  std::vector<double> potential;     // c_i = lambda f'(u_i), i = 0..M-1
  std::vector<double> weight;        // V_i, i = 0..M-1

  std::size_t size() const { return weight.size(); }

  SymmetricTridiagonal matrix() const {
    const std::size_t N = size();
    SymmetricTridiagonal J;
    J.diag.resize(N);
    J.off.resize(N - 1);
    for (std::size_t i = 0; i < N; ++i) {
      double d = conductivity[i] / dr;
      if (i > 0) d += conductivity[i - 1] / dr;
      J.diag[i] = d - weight[i] * potential[i];
      if (i + 1 < N) J.off[i] = -conductivity[i] / dr;
    }
    return J;
  }

  // phi has M+1 entries with phi_M = 0.
  double quadratic_form(std::span<const double> phi) const {
    const std::size_t N = size();
    double q = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double d = phi[i + 1] - phi[i];
      q += conductivity[i] / dr * d * d;
    }
    for (std::size_t i = 0; i < N; ++i) q -= weight[i] * potential[i] * phi[i] * phi[i];
    return q;
  }

  double weighted_norm2(std::span<const double> phi) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += weight[i] * phi[i] * phi[i];
    return s;
  }
};

inline SturmLiouvilleOperator assemble_L(const RadialGrid& grid, std::span<const double> u, double lambda,
                                         const ProblemSpec& spec) {
  const int M = grid.cells();
  SturmLiouvilleOperator op;
  op.dr = grid.dr();
  op.conductivity.resize(M);
  op.potential.resize(M);
  op.weight.resize(M);
  for (int i = 0; i < M; ++i) {
    const double uR = i + 1 == M ? 0.0 : u[i + 1];
    const double s = (uR - u[i]) / grid.dr();
    if (!std::isfinite(s)) throw NumericalError("assemble_L: non-finite slope");
    op.conductivity[i] = grid.area(i) * reduced_gradient_weight(s);
    op.potential[i] = lambda * nonlinearity_d1(spec.p, u[i]);
    op.weight[i] = grid.volume(i);
  }
  return op;
}

inline SturmLiouvilleOperator assemble_L(const RadialGrid& grid, const Profile& pr, double lambda,
                                         const ProblemSpec& spec) {
  return assemble_L(grid, pr.u, lambda, spec);
}

struct EigenResult {
  double mu1 = 0.0;
  std::vector<double> w1;  // M+1 entries, w1_M = 0, sum V w^2 = 1
  int inverse_iterations = 0;
};

inline EigenResult smallest_eigenpair(const SturmLiouvilleOperator& op, double rel_tol = 1e-8) {
  const std::size_t N = op.size();
  if (N < 2) throw NumericalError("smallest_eigenpair: operator too small");
  const SymmetricTridiagonal J = op.matrix();
  // Standard form B = W^{-1/2} J W^{-1/2} for the Sturm count.
  SymmetricTridiagonal B;
  B.diag.resize(N);
  B.off.resize(N - 1);
  for (std::size_t i = 0; i < N; ++i) B.diag[i] = J.diag[i] / op.weight[i];
  for (std::size_t i = 0; i + 1 < N; ++i) B.off[i] = J.off[i] / std::sqrt(op.weight[i] * op.weight[i + 1]);

  double lo = B.diag[0], hi = B.diag[0];
  for (std::size_t i = 0; i < N; ++i) {
    double rad = 0.0;
    if (i > 0) rad += std::abs(B.off[i - 1]);
    if (i + 1 < N) rad += std::abs(B.off[i]);
    lo = std::min(lo, B.diag[i] - rad);
    hi = std::max(hi, B.diag[i] + rad);
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (sturm_count(B, mid) >= 1 ? hi : lo) = mid;
  }
  const double sigma = 0.5 * (lo + hi);

  std::vector<double> dl(N - 1), d(N), du(N - 1);
  for (std::size_t i = 0; i < N; ++i) d[i] = J.diag[i] - sigma * op.weight[i];
  for (std::size_t i = 0; i + 1 < N; ++i) dl[i] = du[i] = J.off[i];
  const TridiagonalLU lu(dl, d, du);

  EigenResult er;
  std::vector<double> x(N, 1.0), y(N);
  double mu = sigma;
  constexpr int cap = 20;
  bool done = false;
  for (int it = 1; it <= cap && !done; ++it) {
    for (std::size_t i = 0; i < N; ++i) y[i] = op.weight[i] * x[i];
    x = lu.solve(y);
    double nrm = 0.0;
    for (std::size_t i = 0; i < N; ++i) nrm += op.weight[i] * x[i] * x[i];
    nrm = std::sqrt(nrm);
    if (!std::isfinite(nrm) || nrm == 0.0) throw NumericalError("smallest_eigenpair: inverse iteration broke down");
    for (double& v : x) v /= nrm;
    const std::vector<double> Jx = J.apply(x);
    double num = 0.0;
    for (std::size_t i = 0; i < N; ++i) num += x[i] * Jx[i];
    mu = num;
    double r2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double ri = Jx[i] - mu * op.weight[i] * x[i];
      r2 += ri * ri / op.weight[i];
    }
    er.inverse_iterations = it;
    done = std::sqrt(r2) <= std::max(rel_tol * std::abs(mu), 1e-13 * scale);
  }
  if (!done) throw NumericalError("smallest_eigenpair: inverse iteration did not converge");

  double sum = 0.0;
  for (double v : x) sum += v;
  if (sum < 0.0)
    for (double& v : x) v = -v;
  er.w1.assign(N + 1, 0.0);
  std::copy(x.begin(), x.end(), er.w1.begin());
  er.mu1 = op.quadratic_form(er.w1) / op.weighted_norm2(er.w1);
  return er;
}

inline double stability_form_Q(const RadialGrid& grid, const Profile& pr, double lambda, const ProblemSpec& spec,
                               std::span<const double> phi) {
  if (phi.size() != std::size_t(grid.cells() + 1)) throw DomainError("stability_form_Q: phi must have M+1 entries");
  if (phi.back() != 0.0) throw DomainError("stability_form_Q: phi must vanish at r = R");
  return assemble_L(grid, pr, lambda, spec).quadratic_form(phi);
}

}  // namespace pmc
