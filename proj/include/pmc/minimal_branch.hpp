#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pmc/apriori_bound.hpp"
#include "pmc/discrete_operator.hpp"
#include "pmc/errors.hpp"
#include "pmc/problem.hpp"
#include "pmc/radial_core.hpp"

namespace pmc {

enum class PicardStop { converged, supercritical, safeguard, max_iter };

inline const char* to_string(PicardStop s) {
  switch (s) {
    case PicardStop::converged: return "converged";
    case PicardStop::supercritical: return "supercritical flux";
    case PicardStop::safeguard: return "sup-norm safeguard";
    case PicardStop::max_iter: return "iteration cap";
  }
  return "?";
}

struct PicardResult {
  Profile profile;
  int iterations = 0;
  bool converged = false;
  bool monotone_certified = true;
  std::vector<double> sup_norm_history;
  PicardStop stop = PicardStop::max_iter;
  double residual = 0.0;  // flux-form residual of the last iterate
};

struct PicardOptions {
  // Near the extremal parameter the contraction factor tends to 1 like
  // sqrt(lambda* - lambda), so the cap is generous.
  int max_iter = 400000;
  std::function<void(int, const Profile&)> on_iterate;
};

inline double picard_safeguard(const ProblemSpec& spec, const RadialGrid& grid, const Profile& lower) {
  double hmax = 0.0;
  for (int i = 0; i <= grid.cells(); ++i) hmax = std::max(hmax, spec.H(grid.node(i)));
  return 100.0 * lower.sup_norm() * (1.0 + spec.R * hmax);
}

inline PicardResult picard_minimal(const ProblemSpec& spec, const RadialGrid& grid, double lambda,
                                   const PicardOptions& opts = {}) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("picard_minimal: lambda must be >= 0");
  const int M = grid.cells();
  const std::vector<double> h = sample(grid, spec.H);
  PicardResult res;
  res.profile = solve_prescribed(grid, h);
  const double cap = picard_safeguard(spec, grid, res.profile);
  res.sup_norm_history.push_back(res.profile.sup_norm());
  if (opts.on_iterate) opts.on_iterate(0, res.profile);

  std::vector<double> g(M + 1);
  for (int k = 1; k <= opts.max_iter; ++k) {
    const std::vector<double>& u = res.profile.u;
    for (int i = 0; i <= M; ++i) g[i] = h[i] + lambda * nonlinearity(spec.p, u[i]);
    Profile next;
    try {
      next = solve_prescribed(grid, g);
    } catch (const SupercriticalFlux&) {
      res.stop = PicardStop::supercritical;
      res.iterations = k;
      return res;
    }
    double change = 0.0;
    for (int i = 0; i <= M; ++i) {
      const double d = next.u[i] - u[i];
      change = std::max(change, std::abs(d));
      if (d < -1e-12) res.monotone_certified = false;
    }
    res.profile = std::move(next);
    res.iterations = k;
    res.sup_norm_history.push_back(res.profile.sup_norm());
    if (opts.on_iterate) opts.on_iterate(k, res.profile);
    if (res.profile.sup_norm() > cap) {
      res.stop = PicardStop::safeguard;
      return res;
    }
    if (change <= spec.tol.picard) {
      res.converged = true;
      res.stop = PicardStop::converged;
      res.residual = residual_norm(grid, residual(grid, spec, res.profile.u, lambda));
      return res;
    }
  }
  res.stop = PicardStop::max_iter;
  return res;
}

struct LambdaStarEstimate {
  double lambda_star = 0.0;
  double lambda_lo = 0.0;  // converged
  double lambda_hi = 0.0;  // failed
  int bisection_steps = 0;
  double upper_bound = 0.0;
};

inline LambdaStarEstimate bisect_lambda_star(const ProblemSpec& spec, const RadialGrid& grid,
                                             const PicardOptions& opts = {}) {
  auto ok = [&](double lam) {
    PicardOptions o;
    o.max_iter = opts.max_iter;
    return picard_minimal(spec, grid, lam, o).converged;
  };
  LambdaStarEstimate est;
  est.upper_bound = apriori_lambda_bound(spec, grid);
  if (!ok(0.0)) throw InconsistencyError("bisect_lambda_star: no solution at lambda = 0");
  if (!std::isfinite(est.upper_bound) || est.upper_bound <= 0.0)
    throw InconsistencyError("bisect_lambda_star: a-priori bound is not positive");
  if (ok(est.upper_bound))
    throw InconsistencyError("bisect_lambda_star: iteration converges at the a-priori bound");
  double lo = 0.0, hi = est.upper_bound;
  while (hi - lo > spec.tol.bisect) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
    ++est.bisection_steps;
  }
  est.lambda_lo = lo;
  est.lambda_hi = hi;
  est.lambda_star = 0.5 * (lo + hi);
  return est;
}

struct BranchSample {
  double lambda = 0.0;
  PicardResult result;
};

struct SweepResult {
  std::vector<BranchSample> samples;
  std::vector<std::string> anomalies;
};

// lambda_star_estimate <= 0 disables the anomaly classification.
inline SweepResult sweep_branch(const ProblemSpec& spec, const RadialGrid& grid,
                                const std::vector<double>& lambdas, double lambda_star_estimate = 0.0,
                                const PicardOptions& opts = {}) {
  SweepResult out;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (k > 0 && !(lambdas[k] > lambdas[k - 1])) throw DomainError("sweep_branch: lambda samples must increase");
    BranchSample s{lambdas[k], picard_minimal(spec, grid, lambdas[k], opts)};
    if (!s.result.converged && (lambda_star_estimate <= 0.0 || lambdas[k] < lambda_star_estimate - spec.tol.bisect))
      out.anomalies.push_back("no convergence at lambda = " + std::to_string(lambdas[k]) + " (" +
                              to_string(s.result.stop) + ")");
    out.samples.push_back(std::move(s));
  }
  return out;
}

inline Profile extremal_solution(const ProblemSpec& spec, const RadialGrid& grid, double lambda_star_estimate,
                                 const PicardOptions& opts = {}) {
  const double lam = std::max(0.0, lambda_star_estimate - spec.tol.bisect);
  PicardResult r = picard_minimal(spec, grid, lam, opts);
  if (!r.converged) throw InconsistencyError("extremal_solution: no convergence just below the estimate");
  return std::move(r.profile);
}

}  // namespace pmc
