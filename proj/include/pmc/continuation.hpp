#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmc/apriori_bound.hpp"
#include "pmc/discrete_operator.hpp"
#include "pmc/errors.hpp"
#include "pmc/linearized.hpp"
#include "pmc/minimal_branch.hpp"
#include "pmc/problem.hpp"
#include "pmc/radial_core.hpp"
#include "pmc/tridiagonal.hpp"

namespace pmc {

struct JacobianParts {
  SymmetricTridiagonal J;            // d res / d u, unknowns 0..M-1
  std::vector<double> lambda_column;  // d res / d lambda = -V_i f(u_i)
};

inline JacobianParts jacobian(const RadialGrid& grid, const ProblemSpec& spec, std::span<const double> u,
                              double lambda) {
  JacobianParts jp;
  jp.J = assemble_L(grid, u, lambda, spec).matrix();
  const int M = grid.cells();
  jp.lambda_column.resize(M);
  for (int i = 0; i < M; ++i) jp.lambda_column[i] = -grid.volume(i) * nonlinearity(spec.p, u[i]);
  return jp;
}

// Largest column-wise relative mismatch between the Jacobian and centered
// differences of the residual (the last column is the lambda derivative).
// step applies to the u columns.
inline double jacobian_fd_mismatch(const RadialGrid& grid, const ProblemSpec& spec, std::span<const double> u,
                                   double lambda, double step = 1e-6) {
  const int M = grid.cells();
  const JacobianParts jp = jacobian(grid, spec, u, lambda);
  std::vector<double> w(u.begin(), u.end());
  double worst = 0.0;
  auto compare = [&](const std::vector<double>& rp, const std::vector<double>& rm, auto&& exact, double h) {
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < M; ++i) {
      const double fd = (rp[i] - rm[i]) / (2.0 * h);
      const double ex = exact(i);
      err = std::max(err, std::abs(fd - ex));
      scale = std::max(scale, std::abs(ex));
    }
    worst = std::max(worst, scale > 0.0 ? err / scale : err);
  };
  for (int j = 0; j < M; ++j) {
    const double keep = w[j];
    w[j] = keep + step;
    const auto rp = residual(grid, spec, w, lambda);
    w[j] = keep - step;
    const auto rm = residual(grid, spec, w, lambda);
    w[j] = keep;
    compare(rp, rm, [&](int i) {
      if (i == j) return jp.J.diag[i];
      if (i + 1 == j) return jp.J.off[i];
      if (i == j + 1) return jp.J.off[j];
      return 0.0;
    }, step);
  }
  // The lambda column -V f(u) can be tiny for small states, so its step follows
  // the usual centered-difference rule h = eps^{1/3} max(1, |lambda|).
  const double hl = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(lambda));
  const auto rp = residual(grid, spec, u, lambda + hl);
  const auto rm = residual(grid, spec, u, lambda - hl);
  compare(rp, rm, [&](int i) { return jp.lambda_column[i]; }, hl);
  return worst;
}

struct ContinuationState {
  std::vector<double> u;  // M+1 entries, u_M = 0
  double lambda = 0.0;
  std::vector<double> tangent_u;  // M+1 entries
  double tangent_lambda = 1.0;
  double ds = 0.0;
  int step_index = 0;
};

inline double weighted_dot(const RadialGrid& grid, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (int i = 0; i < grid.cells(); ++i) s += grid.volume(i) * a[i] * b[i];
  return s;
}

namespace detail {

// [J c; (V t)^T tl] [x; y] = [f; g] by block elimination, one refinement pass.
class BorderedSolver {
 public:
  BorderedSolver(const RadialGrid& grid, const JacobianParts& jp, std::span<const double> tu, double tl)
      : grid_(grid), jp_(jp), lu_(TridiagonalLU::symmetric(jp.J)), tu_(tu), tl_(tl) {
    b_ = lu_.solve(jp.lambda_column);
    den_ = tl_ - weighted_dot(grid_, tu_, b_);
    if (den_ == 0.0 || !std::isfinite(den_)) throw NumericalError("bordered system is singular");
  }

  std::pair<std::vector<double>, double> solve(std::span<const double> f, double g) const {
    auto [x, y] = raw(f, g);
    const std::vector<double> Jx = jp_.J.apply(x);
    std::vector<double> rf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) rf[i] = f[i] - Jx[i] - jp_.lambda_column[i] * y;
    const double rg = g - weighted_dot(grid_, tu_, x) - tl_ * y;
    auto [dx, dy] = raw(rf, rg);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    return {std::move(x), y + dy};
  }

  const std::vector<double>& lambda_response() const { return b_; }

 private:
  std::pair<std::vector<double>, double> raw(std::span<const double> f, double g) const {
    std::vector<double> a = lu_.solve(f);
    const double y = (g - weighted_dot(grid_, tu_, a)) / den_;
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b_[i] * y;
    return {std::move(a), y};
  }

  const RadialGrid& grid_;
  const JacobianParts& jp_;
  TridiagonalLU lu_;
  std::span<const double> tu_;
  double tl_;
  std::vector<double> b_;
  double den_;
};

}  // namespace detail

// Unit tangent (sum V du^2 + dlambda^2 = 1) oriented along the previous one.
inline std::pair<std::vector<double>, double> branch_tangent(const RadialGrid& grid, const ProblemSpec& spec,
                                                             std::span<const double> u, double lambda,
                                                             std::span<const double> prev_u, double prev_lambda) {
  const JacobianParts jp = jacobian(grid, spec, u, lambda);
  const detail::BorderedSolver bs(grid, jp, prev_u, prev_lambda);
  const int M = grid.cells();
  auto [x, y] = bs.solve(std::vector<double>(M, 0.0), 1.0);
  std::vector<double> t(M + 1, 0.0);
  std::copy(x.begin(), x.end(), t.begin());
  const double nrm = std::sqrt(weighted_dot(grid, t, t) + y * y);
  for (double& v : t) v /= nrm;
  return {std::move(t), y / nrm};
}

struct CorrectorResult {
  std::vector<double> u;
  double lambda = 0.0;
  int iterations = 0;
  double residual_norm = 0.0;
};

inline CorrectorResult newton_correct(const RadialGrid& grid, const ProblemSpec& spec, const ContinuationState& anchor,
                                      double ds, int max_iter = 25) {
  const int M = grid.cells();
  CorrectorResult cr;
  cr.u.resize(M + 1);
  for (int i = 0; i <= M; ++i) cr.u[i] = anchor.u[i] + ds * anchor.tangent_u[i];
  cr.u[M] = 0.0;
  cr.lambda = anchor.lambda + ds * anchor.tangent_lambda;
  const double constraint_tol = 1e-13 * std::max(1.0, std::abs(ds));
  // After the tolerance is met one more step is taken: near the fold a residual
  // component along the null vector moves lambda by residual / <w, V f(u)>.
  std::optional<CorrectorResult> accepted;
  for (int it = 0;; ++it) {
    const std::vector<double> res = residual(grid, spec, cr.u, cr.lambda);
    std::vector<double> du(M + 1);
    for (int i = 0; i <= M; ++i) du[i] = cr.u[i] - anchor.u[i];
    const double N = weighted_dot(grid, anchor.tangent_u, du) + anchor.tangent_lambda * (cr.lambda - anchor.lambda) - ds;
    cr.residual_norm = residual_norm(grid, res);
    cr.iterations = it;
    if (!std::isfinite(cr.residual_norm)) throw NoConvergence("newton_correct: residual is not finite");
    const bool ok = cr.residual_norm <= spec.tol.newton && std::abs(N) <= constraint_tol;
    if (accepted) {
      if (ok && cr.residual_norm <= accepted->residual_norm) return cr;
      return *accepted;
    }
    if (ok) {
      if (cr.residual_norm <= 1e-3 * spec.tol.newton) return cr;
      accepted = cr;
    }
    if (!ok && it == max_iter) throw NoConvergence("newton_correct: no convergence within the iteration cap");
    const JacobianParts jp = jacobian(grid, spec, cr.u, cr.lambda);
    const detail::BorderedSolver bs(grid, jp, anchor.tangent_u, anchor.tangent_lambda);
    std::vector<double> f(M);
    for (int i = 0; i < M; ++i) f[i] = -res[i];
    const auto [x, y] = bs.solve(f, -N);
    for (int i = 0; i < M; ++i) cr.u[i] += x[i];
    cr.lambda += y;
  }
}

struct BranchPoint {
  int index = 0;
  double lambda = 0.0;
  double u0 = 0.0;
  double sup_ur = 0.0;
  double mu1 = std::numeric_limits<double>::quiet_NaN();
  double bv_norm = 0.0;
  double residual = 0.0;
  double arclength = 0.0;
  double tangent_lambda = 1.0;
};

struct FoldInfo {
  double lambda_fold = 0.0;
  std::vector<double> u_fold;
  double lambda_second_deriv = 0.0;
  double vertex_slope = 0.0;  // fitted dlambda/ds at the vertex
  double arclength = 0.0;
  double window_ds = 0.0;     // mean spacing of the fitted points
  double curvature_identity_gap = std::numeric_limits<double>::quiet_NaN();
  int crossing_index = 0;     // first point with a non-positive lambda tangent
};

inline std::optional<int> find_fold_crossing(std::span<const BranchPoint> pts) {
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (pts[k - 1].tangent_lambda > 0.0 && pts[k].tangent_lambda <= 0.0) return int(k);
  return std::nullopt;
}

// Quadratic least-squares fit of lambda(s) through the 5 points nearest the
// tangent sign change. profiles may be empty (u_fold is then left empty).
inline FoldInfo locate_fold(std::span<const BranchPoint> pts, std::span<const std::vector<double>> profiles = {}) {
  const auto cross = find_fold_crossing(pts);
  if (!cross) throw NoFold("locate_fold: the lambda tangent never changes sign");
  const int k = *cross;
  const BranchPoint& a = pts[k - 1];
  const BranchPoint& b = pts[k];
  // vertex guess where the tangent component vanishes, linear in s
  const double s_guess =
      a.arclength + (b.arclength - a.arclength) * a.tangent_lambda / (a.tangent_lambda - b.tangent_lambda);
  std::vector<int> idx(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) idx[i] = int(i);
  std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) {
    return std::abs(pts[x].arclength - s_guess) < std::abs(pts[y].arclength - s_guess);
  });
  if (idx.size() < 5) throw NoFold("locate_fold: fewer than 5 points");
  idx.resize(5);
  std::sort(idx.begin(), idx.end());
  const double s0 = pts[idx[2]].arclength;

  // normal equations for lambda = c0 + c1 t + c2 t^2, t = s - s0
  std::array<double, 5> S{};
  std::array<double, 3> T{};
  for (int i : idx) {
    const double t = pts[i].arclength - s0;
    double tp = 1.0;
    for (int m = 0; m < 5; ++m) {
      S[m] += tp;
      if (m < 3) T[m] += tp * pts[i].lambda;
      tp *= t;
    }
  }
  double A[3][4] = {{S[0], S[1], S[2], T[0]}, {S[1], S[2], S[3], T[1]}, {S[2], S[3], S[4], T[2]}};
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    for (int r = c + 1; r < 3; ++r) {
      const double f = A[r][c] / A[c][c];
      for (int m = c; m < 4; ++m) A[r][m] -= f * A[c][m];
    }
  }
  double c[3];
  for (int r = 2; r >= 0; --r) {
    double acc = A[r][3];
    for (int m = r + 1; m < 3; ++m) acc -= A[r][m] * c[m];
    c[r] = acc / A[r][r];
  }

  FoldInfo fi;
  fi.crossing_index = k;
  fi.lambda_second_deriv = 2.0 * c[2];
  if (!(fi.lambda_second_deriv < 0.0)) throw NoFold("locate_fold: fitted second derivative is not negative");
  const double tv = -c[1] / (2.0 * c[2]);
  fi.arclength = s0 + tv;
  fi.lambda_fold = c[0] + c[1] * tv + c[2] * tv * tv;
  fi.vertex_slope = c[1] + 2.0 * c[2] * tv;
  fi.window_ds = (pts[idx[4]].arclength - pts[idx[0]].arclength) / 4.0;
  if (std::abs(fi.vertex_slope) > 1e-6 * std::abs(fi.lambda_second_deriv) * fi.window_ds)
    throw NumericalError("locate_fold: fitted slope at the vertex is not zero");

  if (!profiles.empty()) {
    // quadratic interpolation of u in s through the three points nearest the vertex
    std::vector<int> near(idx.begin(), idx.end());
    std::stable_sort(near.begin(), near.end(), [&](int x, int y) {
      return std::abs(pts[x].arclength - fi.arclength) < std::abs(pts[y].arclength - fi.arclength);
    });
    near.resize(3);
    const std::size_t N = profiles[near[0]].size();
    fi.u_fold.assign(N, 0.0);
    for (int j = 0; j < 3; ++j) {
      double L = 1.0;
      for (int m = 0; m < 3; ++m)
        if (m != j)
          L *= (fi.arclength - pts[near[m]].arclength) / (pts[near[j]].arclength - pts[near[m]].arclength);
      for (std::size_t i = 0; i < N; ++i) fi.u_fold[i] += L * profiles[near[j]][i];
    }
  }
  return fi;
}

struct CurvatureCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double implied_second_deriv = 0.0;
  double f_integral = 0.0;   // sum V f(u) w
  double f2_integral = 0.0;  // sum V f''(u) w^3
};

// Cubic-form identity at the fold with w normalised to sum V w^2 = 1.
// For p < 2 cells touching r = R are left out of the f'' integral.
inline CurvatureCheck fold_curvature_check(const RadialGrid& grid, const ProblemSpec& spec,
                                           std::span<const double> u_fold, double lambda_fold,
                                           double lambda_second_deriv, std::span<const double> w_star) {
  const int M = grid.cells();
  if (spec.p < 2.0)
    for (int i = 0; i < M; ++i)
      if (!(u_fold[i] > 0.0)) throw PreconditionError("fold_curvature_check: u must be positive inside for p < 2");
  double nrm = 0.0, sum = 0.0;
  for (int i = 0; i < M; ++i) {
    nrm += grid.volume(i) * w_star[i] * w_star[i];
    sum += w_star[i];
  }
  if (!(nrm > 0.0)) throw PreconditionError("fold_curvature_check: degenerate eigenvector");
  const double scale = (sum < 0.0 ? -1.0 : 1.0) / std::sqrt(nrm);
  std::vector<double> w(M + 1, 0.0);
  for (int i = 0; i < M; ++i) {
    w[i] = scale * w_star[i];
    if (!(w[i] > 0.0)) throw PreconditionError("fold_curvature_check: eigenvector is not positive");
  }
  CurvatureCheck cc;
  for (int i = 0; i < M; ++i) {
    const double s = (u_fold[i + 1] - u_fold[i]) / grid.dr();
    const double wr = (w[i + 1] - w[i]) / grid.dr();
    cc.lhs += graph_flux_d2(s) * wr * wr * wr * grid.area(i) * grid.dr();
  }
  const int last = spec.p < 2.0 ? M - 1 : M;
  for (int i = 0; i < M; ++i) cc.f_integral += grid.volume(i) * nonlinearity(spec.p, u_fold[i]) * w[i];
  for (int i = 0; i < last; ++i)
    cc.f2_integral += grid.volume(i) * nonlinearity_d2(spec.p, u_fold[i]) * w[i] * w[i] * w[i];
  cc.rhs = lambda_second_deriv * cc.f_integral + lambda_fold * cc.f2_integral;
  cc.gap = std::abs(cc.lhs - cc.rhs) / std::abs(cc.rhs);
  cc.implied_second_deriv = (cc.lhs - lambda_fold * cc.f2_integral) / cc.f_integral;
  return cc;
}

struct TraceOptions {
  double ds0 = 0.01;
  int max_steps = 4000;
  // Stop once past the fold with lambda below this value; unset means half the fold value.
  std::optional<double> lambda_stop;
  double ds_min = 1e-10;
  double ds_max = 0.5;
  // Step used across the fold; 0 picks 2e-5 times the weighted norm of u. The
  // curve turns mostly in u there, so lambda(s) is parabolic only on a short window.
  double fold_ds = 0.0;
  int fold_steps = 6;
  int fast_iterations = 3;
  int newton_max_iter = 25;
  bool compute_mu1 = true;
};

struct TraceResult {
  std::vector<BranchPoint> points;
  std::vector<std::vector<double>> profiles;
  std::optional<FoldInfo> fold;
  bool complete = false;
  std::string termination;
};

inline BranchPoint make_point(const RadialGrid& grid, const ProblemSpec& spec, std::span<const double> u,
                              double lambda, bool with_mu1) {
  BranchPoint bp;
  bp.lambda = lambda;
  bp.u0 = u[0];
  const std::vector<double> s = slopes_of(grid, u);
  for (double v : s) bp.sup_ur = std::max(bp.sup_ur, std::abs(v));
  bp.bv_norm = bv_norm(grid, s);
  bp.residual = residual_norm(grid, residual(grid, spec, u, lambda));
  if (with_mu1) bp.mu1 = smallest_eigenpair(assemble_L(grid, u, lambda, spec), spec.tol.eig).mu1;
  return bp;
}

inline TraceResult trace_branch(const ProblemSpec& spec, const RadialGrid& grid, const TraceOptions& opts = {}) {
  const int M = grid.cells();
  TraceResult tr;
  ContinuationState st;
  st.u = lower_solution(spec, grid).u;
  st.lambda = 0.0;
  {
    std::vector<double> up(M + 1, 0.0);
    auto [tu, tl] = branch_tangent(grid, spec, st.u, st.lambda, up, 1.0);
    st.tangent_u = std::move(tu);
    st.tangent_lambda = tl;
  }
  auto record = [&](double arclength) {
    BranchPoint bp = make_point(grid, spec, st.u, st.lambda, opts.compute_mu1);
    bp.index = int(tr.points.size());
    bp.arclength = arclength;
    bp.tangent_lambda = st.tangent_lambda;
    tr.points.push_back(bp);
    tr.profiles.push_back(st.u);
  };
  record(0.0);

  double ds = opts.ds0, s = 0.0, fold_ds = opts.fold_ds;
  bool approaching = false, past_fold = false;
  int fine_left = 0;
  double stop_at = opts.lambda_stop.value_or(0.0);
  for (int step = 1; step <= opts.max_steps; ++step) {
    CorrectorResult cr;
    try {
      cr = newton_correct(grid, spec, st, ds, opts.newton_max_iter);
    } catch (const NumericalError&) {
      ds *= 0.5;
      if (ds < opts.ds_min) {
        tr.termination = "step size underflow";
        break;
      }
      continue;
    }
    auto [tu, tl] = branch_tangent(grid, spec, cr.u, cr.lambda, st.tangent_u, st.tangent_lambda);
    const bool crossing = !past_fold && st.tangent_lambda > 0.0 && tl <= 0.0;
    if (crossing) {
      if (fold_ds <= 0.0) fold_ds = 2e-5 * std::sqrt(weighted_dot(grid, st.u, st.u));
      if (ds > fold_ds * (1.0 + 1e-12)) {
        approaching = true;
        ds = std::max(0.25 * ds, fold_ds);
        continue;
      }
    }
    // chord length in the weighted metric
    double d2 = (cr.lambda - st.lambda) * (cr.lambda - st.lambda);
    for (int i = 0; i < M; ++i) d2 += grid.volume(i) * (cr.u[i] - st.u[i]) * (cr.u[i] - st.u[i]);
    s += std::sqrt(d2);
    st.u = std::move(cr.u);
    st.lambda = cr.lambda;
    st.tangent_u = std::move(tu);
    st.tangent_lambda = tl;
    st.ds = ds;
    st.step_index = step;
    record(s);
    if (crossing) {
      past_fold = true;
      approaching = false;
      fine_left = opts.fold_steps;
      if (!opts.lambda_stop) stop_at = 0.5 * st.lambda;
    }
    if (past_fold && st.lambda <= stop_at) {
      tr.termination = "reached lambda_stop";
      break;
    }
    if (fine_left > 0) {
      --fine_left;
      ds = fold_ds;
    } else if (!approaching && cr.iterations <= opts.fast_iterations) {
      ds = std::min(ds * 1.3, opts.ds_max);
    }
  }
  if (tr.termination.empty()) tr.termination = "step limit";
  if (past_fold) {
    tr.fold = locate_fold(tr.points, tr.profiles);
    tr.complete = true;
  }
  return tr;
}

// Fixed-lambda Newton from the upper-segment interpolant.
inline Profile second_solution(const ProblemSpec& spec, const RadialGrid& grid, double lambda, const TraceResult& tr,
                               int max_iter = 25) {
  if (!tr.fold) throw PreconditionError("second_solution: branch was not traced past a fold");
  if (!(lambda < tr.fold->lambda_fold)) throw DomainError("second_solution: lambda must lie below the fold");
  const int M = grid.cells();
  const int k0 = tr.fold->crossing_index;
  std::optional<std::vector<double>> seed;
  for (int k = k0; k + 1 < int(tr.points.size()) && !seed; ++k) {
    const double la = tr.points[k].lambda, lb = tr.points[k + 1].lambda;
    if ((la - lambda) * (lb - lambda) <= 0.0 && la != lb) {
      const double t = (lambda - la) / (lb - la);
      std::vector<double> u(M + 1);
      for (int i = 0; i <= M; ++i) u[i] = (1.0 - t) * tr.profiles[k][i] + t * tr.profiles[k + 1][i];
      seed = std::move(u);
    }
  }
  if (!seed) throw NoConvergence("second_solution: lambda is outside the traced upper segment");
  std::vector<double> u = std::move(*seed);
  for (int it = 0;; ++it) {
    const std::vector<double> res = residual(grid, spec, u, lambda);
    const double nrm = residual_norm(grid, res);
    if (!std::isfinite(nrm)) throw NoConvergence("second_solution: residual is not finite");
    if (nrm <= spec.tol.newton) break;
    if (it == max_iter) throw NoConvergence("second_solution: Newton did not converge");
    const TridiagonalLU lu = TridiagonalLU::symmetric(jacobian(grid, spec, u, lambda).J);
    std::vector<double> f(M);
    for (int i = 0; i < M; ++i) f[i] = -res[i];
    const std::vector<double> du = lu.solve(f);
    for (int i = 0; i < M; ++i) u[i] += du[i];
  }
  const PicardResult minimal = picard_minimal(spec, grid, lambda);
  double dist = 0.0;
  for (int i = 0; i <= M; ++i) dist = std::max(dist, std::abs(u[i] - minimal.profile.u[i]));
  if (!minimal.converged) throw NoConvergence("second_solution: no minimal solution to compare with");
  if (dist < 1e3 * spec.tol.newton)
    throw DistanceTooSmall("second_solution: Newton returned the minimal solution");
  return profile_from_nodes(grid, std::move(u));
}

}  // namespace pmc
