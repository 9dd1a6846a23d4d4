#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include "pmc/errors.hpp"
#include "pmc/problem.hpp"

namespace pmc {

// Uniform radial grid r_i = i R / M with half-node areas r_{i+1/2}^{n-1} and
// exact cell volumes int_{cell} s^{n-1} ds. The angular factor is omitted.
class RadialGrid {
 public:
  RadialGrid(int n, double R, int M) : n_(n), R_(R), M_(M) {
    if (M < 16) throw ConfigurationError("grid.M: at least 16 cells required");
    if (n < 1 || !(R > 0.0)) throw ConfigurationError("grid: invalid dimension or radius");
    dr_ = R / M;
    nodes_.resize(M + 1);
    for (int i = 0; i <= M; ++i) nodes_[i] = R * double(i) / M;
    nodes_[M] = R;
    areas_.resize(M);
    for (int i = 0; i < M; ++i) areas_[i] = std::pow(half_node(i), n - 1);
    volumes_.resize(M + 1);
    auto prim = [n](double r) { return std::pow(r, n) / n; };
    for (int i = 0; i <= M; ++i) {
      const double a = i == 0 ? 0.0 : half_node(i - 1);
      const double b = i == M ? R : half_node(i);
      volumes_[i] = prim(b) - prim(a);
    }
  }

  int dim() const { return n_; }
  double radius() const { return R_; }
  int cells() const { return M_; }
  double dr() const { return dr_; }

  double node(int i) const { return nodes_[i]; }
  // r_{i+1/2}
  double half_node(int i) const { return (double(i) + 0.5) * dr_; }
  // A_{i+1/2}
  double area(int i) const { return areas_[i]; }
  double volume(int i) const { return volumes_[i]; }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> areas() const { return areas_; }
  std::span<const double> volumes() const { return volumes_; }

  double total_volume() const {
    double s = 0.0;
    for (double v : volumes_) s += v;
    return s;
  }

  double boundary_area() const { return std::pow(R_, n_ - 1); }

 private:
  int n_;
  double R_;
  int M_;
  double dr_;
  std::vector<double> nodes_, areas_, volumes_;
};

inline RadialGrid build_grid(const ProblemSpec& spec, int M) { return RadialGrid(spec.n, spec.R, M); }

// Node values u_0..u_M (u_M = 0) and half-node slopes s_{i+1/2}, i = 0..M-1.
struct Profile {
  std::vector<double> u;
  std::vector<double> slope;
  bool marginal = false;

  double height() const { return u.empty() ? 0.0 : u.front(); }
  double sup_norm() const {
    double s = 0.0;
    for (double v : u) s = std::max(s, std::abs(v));
    return s;
  }
  double sup_slope() const {
    double s = 0.0;
    for (double v : slope) s = std::max(s, std::abs(v));
    return s;
  }
};

inline std::vector<double> slopes_of(const RadialGrid& grid, std::span<const double> u) {
  std::vector<double> s(grid.cells());
  for (int i = 0; i < grid.cells(); ++i) s[i] = (u[i + 1] - u[i]) / grid.dr();
  return s;
}

inline Profile profile_from_nodes(const RadialGrid& grid, std::vector<double> u) {
  Profile pr;
  pr.slope = slopes_of(grid, u);
  pr.u = std::move(u);
  return pr;
}

inline std::vector<double> sample(const RadialGrid& grid, const CurvatureField& H) {
  std::vector<double> g(grid.cells() + 1);
  for (int i = 0; i <= grid.cells(); ++i) g[i] = H(grid.node(i));
  return g;
}

// q_i = r_i^{1-n} int_0^{r_i} g s^{n-1} ds, composite trapezoid on the nodes.
inline std::vector<double> flux_ratio(const RadialGrid& grid, std::span<const double> g) {
  const int M = grid.cells(), n = grid.dim();
  std::vector<double> q(M + 1, 0.0);
  double integral = 0.0;
  double prev = 0.0;  // g(0) * 0^{n-1} (n = 1 handled below)
  if (n == 1) prev = g[0];
  for (int i = 1; i <= M; ++i) {
    const double r = grid.node(i);
    const double w = std::pow(r, n - 1);
    const double cur = g[i] * w;
    integral += 0.5 * grid.dr() * (prev + cur);
    prev = cur;
    q[i] = integral / w;
  }
  return q;
}

// Finite-volume flux through the half nodes and through r = R:
// Q_{i+1/2} = A_{i+1/2}^{-1} sum_{j<=i} V_j g_j, last entry is Q(R).
inline std::vector<double> cell_flux(const RadialGrid& grid, std::span<const double> g) {
  const int M = grid.cells();
  std::vector<double> Q(M + 1);
  double S = 0.0;
  for (int i = 0; i < M; ++i) {
    S += grid.volume(i) * g[i];
    Q[i] = S / grid.area(i);
  }
  S += grid.volume(M) * g[M];
  Q[M] = S / grid.boundary_area();
  return Q;
}

// Surface area of the unit sphere in R^n.
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

// Total variation of u including the angular factor.
inline double bv_norm(const RadialGrid& grid, std::span<const double> slope) {
  double s = 0.0;
  for (int i = 0; i < grid.cells(); ++i) s += std::abs(slope[i]) * grid.area(i) * grid.dr();
  return sphere_area(grid.dim()) * s;
}

namespace detail {

// int of q / sqrt(1 - q^2) over an interval of length L where q is linear from a to b.
inline double graph_drop(double L, double a, double b) {
  const double sa = std::sqrt(std::max(0.0, 1.0 - a * a));
  const double sb = std::sqrt(std::max(0.0, 1.0 - b * b));
  const double den = sa + sb;
  if (den == 0.0) return 0.0;
  return L * (a + b) / den;
}

}  // namespace detail

inline constexpr double marginal_tolerance = 1e-9;

// Inverts the discrete flux relation h(u_r) = -Q for the right-hand side g.
inline Profile solve_prescribed(const RadialGrid& grid, std::span<const double> g) {
  const int M = grid.cells();
  if (g.size() != std::size_t(M + 1)) throw DomainError("solve_prescribed: g must have M+1 entries");
  const std::vector<double> Q = cell_flux(grid, g);
  for (int i = 0; i < M; ++i) {
    if (!std::isfinite(Q[i])) throw SupercriticalFlux("solve_prescribed: non-finite flux");
    if (std::abs(Q[i]) >= 1.0) throw SupercriticalFlux("solve_prescribed: flux ratio reaches 1 inside the ball");
  }
  const double QR = Q[M];
  if (!std::isfinite(QR) || std::abs(QR) > 1.0 + marginal_tolerance)
    throw SupercriticalFlux("solve_prescribed: flux ratio exceeds 1 at the boundary");

  Profile pr;
  pr.marginal = std::abs(QR) >= 1.0 - marginal_tolerance;
  pr.slope.resize(M);
  for (int i = 0; i < M; ++i) pr.slope[i] = -Q[i] / std::sqrt(1.0 - Q[i] * Q[i]);

  pr.u.assign(M + 1, 0.0);
  if (!pr.marginal) {
    for (int i = M - 1; i >= 0; --i) pr.u[i] = pr.u[i + 1] - grid.dr() * pr.slope[i];
  } else {
    // q piecewise linear through q(0) = 0, the half-node fluxes and q(R) = +-1;
    // each piece is integrated exactly so the boundary singularity costs nothing.
    const double h2 = 0.5 * grid.dr();
    const double qR = std::copysign(1.0, QR);
    for (int i = M - 1; i >= 0; --i) {
      const double qi = i == 0 ? 0.0 : 0.5 * (Q[i - 1] + Q[i]);
      const double qn = i + 1 == M ? qR : 0.5 * (Q[i] + Q[i + 1]);
      pr.u[i] = pr.u[i + 1] + detail::graph_drop(h2, qi, Q[i]) + detail::graph_drop(h2, Q[i], qn);
    }
  }
  pr.u[M] = 0.0;
  return pr;
}

// Closed-form spherical cap for a constant right-hand side.
class CapOracle {
 public:
  CapOracle(int n, double R, double H0) : n_(n), R_(R), a_(H0 / n) {
    if (!(H0 > 0.0) || a_ * R > 1.0) throw DomainError("cap_oracle: requires 0 < H0 R / n <= 1");
    tail_ = std::sqrt(std::max(0.0, 1.0 - a_ * a_ * R * R));
  }

  double height(double r) const { return (std::sqrt(1.0 - a_ * a_ * r * r) - tail_) / a_; }
  double slope(double r) const {
    const double q = a_ * r;
    return -q / std::sqrt(1.0 - q * q);
  }
  double radius() const { return R_; }
  int dim() const { return n_; }

 private:
  int n_;
  double R_, a_, tail_;
};

inline CapOracle cap_oracle(int n, double R, double H0) { return CapOracle(n, R, H0); }

inline void write_profile(std::ostream& os, const RadialGrid& grid, const Profile& pr) {
  const auto old = os.precision(17);
  for (int i = 0; i <= grid.cells(); ++i) os << grid.node(i) << ' ' << pr.u[i] << '\n';
  os.precision(old);
}

}  // namespace pmc
