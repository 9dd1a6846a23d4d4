#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "pmc/errors.hpp"

namespace pmc {

// H(r) = sum_k c_k r^k, degree at most 8.
class CurvatureField {
 public:
  static constexpr std::size_t max_degree = 8;

  CurvatureField() : coef_{1.0} {}
  explicit CurvatureField(std::vector<double> coefficients) : coef_(std::move(coefficients)) {
    if (coef_.empty()) throw ConfigurationError("H: at least one coefficient required");
    if (coef_.size() > max_degree + 1) throw ConfigurationError("H: degree exceeds 8");
    for (double c : coef_)
      if (!std::isfinite(c)) throw ConfigurationError("H: coefficients must be finite");
    while (coef_.size() > 1 && coef_.back() == 0.0) coef_.pop_back();
  }

  static CurvatureField constant(double h0) { return CurvatureField({h0}); }

  bool is_constant() const { return coef_.size() == 1; }
  const std::vector<double>& coefficients() const { return coef_; }

  double operator()(double r) const {
    double acc = 0.0;
    for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) acc = acc * r + *it;
    return acc;
  }

  double derivative(double r) const {
    double acc = 0.0;
    for (std::size_t k = coef_.size(); k-- > 1;) acc = acc * r + double(k) * coef_[k];
    return acc;
  }

  // Taylor coefficients of H about m.
  std::vector<double> shifted(double m) const {
    std::vector<double> d = coef_;
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = n - 1; k > i; --k) d[k - 1] += m * d[k];
    return d;
  }

  // (1/r^{n-1}) int_0^r H(s) s^{n-1} ds, exact.
  double flux(int n, double r) const {
    double acc = 0.0;
    for (std::size_t k = coef_.size(); k-- > 0;) acc = acc * r + coef_[k] / double(int(k) + n);
    return acc * r;
  }

  friend bool operator==(const CurvatureField&, const CurvatureField&) = default;

 private:
  std::vector<double> coef_;
};

struct Tolerances {
  double picard = 1e-10;
  double newton = 1e-10;
  double eig = 1e-8;
  double bisect = 1e-5;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct ProblemSpec {
  int n = 2;
  double R = 1.0;
  double p = 2.0;
  CurvatureField H;
  double eps0 = 0.1;
  Tolerances tol;

  void validate() const {
    if (n < 1) throw ConfigurationError("problem.n: n must be >= 1");
    if (!(R > 0.0) || !std::isfinite(R)) throw ConfigurationError("problem.R: R must be > 0");
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigurationError("problem.p: p must be >= 1");
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw ConfigurationError("problem.eps0: eps0 must lie in (0,1)");
    auto pos = [](double t, const char* key) {
      if (!(t > 0.0) || !std::isfinite(t)) throw ConfigurationError(std::string(key) + ": tolerance must be > 0");
    };
    pos(tol.picard, "problem.picard_tol");
    pos(tol.newton, "problem.newton_tol");
    pos(tol.eig, "problem.eig_tol");
    pos(tol.bisect, "problem.bisect_tol");
  }

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

inline double eval_H(const ProblemSpec& spec, double r) {
  if (!(r >= 0.0 && r <= spec.R)) throw DomainError("eval_H: radius outside [0,R]");
  return spec.H(r);
}

// f(u) = |u|^{p-1} u and its derivatives.
inline double nonlinearity(double p, double u) {
  if (p == 1.0) return u;
  if (p == 2.0) return std::abs(u) * u;
  return std::copysign(std::pow(std::abs(u), p), u);
}

inline double nonlinearity_d1(double p, double u) {
  if (p == 1.0) return 1.0;
  if (p == 2.0) return 2.0 * std::abs(u);
  return p * std::pow(std::abs(u), p - 1.0);
}

inline double nonlinearity_d2(double p, double u) {
  if (p == 1.0) return 0.0;
  if (p == 2.0) return u == 0.0 ? 0.0 : std::copysign(2.0, u);
  return std::copysign(p * (p - 1.0) * std::pow(std::abs(u), p - 2.0), u);
}

struct ConditionReport {
  double interior_margin = 0.0;
  bool boundary_strict_ok = false;
  bool boundary_ball_relaxed_ok = false;
  bool positivity_ok = false;
  bool admissible = false;
  // Only concentric balls are tested for the interior condition.
  bool ball_restricted = true;
  double min_H = 0.0;
};

namespace detail {

inline double taylor_lower_bound(const std::vector<double>& d, double w) {
  double lo = d[0], wk = 1.0;
  for (std::size_t k = 1; k < d.size(); ++k) {
    wk *= w;
    lo -= std::abs(d[k]) * wk;
  }
  return lo;
}

// true if H > 0 on [a,b] is certified, false if a nonpositive value was found
// or the subdivision budget ran out.
inline bool certify_positive(const CurvatureField& H, double a, double b, int depth) {
  const double m = 0.5 * (a + b);
  if (!(H(a) > 0.0) || !(H(b) > 0.0) || !(H(m) > 0.0)) return false;
  if (taylor_lower_bound(H.shifted(m), 0.5 * (b - a)) > 0.0) return true;
  if (depth == 0) return false;
  return certify_positive(H, a, m, depth - 1) && certify_positive(H, m, b, depth - 1);
}

}  // namespace detail

inline ConditionReport check_admissibility(const ProblemSpec& spec) {
  ConditionReport rep;
  constexpr int samples = 4096;
  double qmax = 0.0, hmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= samples; ++k) {
    const double r = spec.R * double(k) / samples;
    hmin = std::min(hmin, spec.H(r));
    if (k > 0) qmax = std::max(qmax, spec.H.flux(spec.n, r));
  }
  rep.min_H = hmin;
  rep.interior_margin = 1.0 - qmax;
  rep.positivity_ok = hmin > 0.0 &&
                      (spec.H.is_constant() || detail::certify_positive(spec.H, 0.0, spec.R, 24));
  const double HR = spec.H(spec.R);
  rep.boundary_strict_ok = HR <= (1.0 - spec.eps0) * double(spec.n - 1) / spec.R;
  rep.boundary_ball_relaxed_ok = HR <= (1.0 - spec.eps0) * double(spec.n) / spec.R;
  rep.admissible = rep.positivity_ok && rep.interior_margin >= spec.eps0 &&
                   (rep.boundary_strict_ok || rep.boundary_ball_relaxed_ok);
  return rep;
}

}  // namespace pmc
