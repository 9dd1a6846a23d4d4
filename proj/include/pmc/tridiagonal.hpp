#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "pmc/errors.hpp"

namespace pmc {

struct SymmetricTridiagonal {
  std::vector<double> diag;  // size N
  std::vector<double> off;   // size N-1, entry (i, i+1)

  std::size_t size() const { return diag.size(); }

  std::vector<double> apply(std::span<const double> x) const {
    const std::size_t N = diag.size();
    std::vector<double> y(N);
    for (std::size_t i = 0; i < N; ++i) {
      double acc = diag[i] * x[i];
      if (i > 0) acc += off[i - 1] * x[i - 1];
      if (i + 1 < N) acc += off[i] * x[i + 1];
      y[i] = acc;
    }
    return y;
  }
};

// LU with partial pivoting for a general tridiagonal matrix (same scheme as
// LAPACK dgttrf/dgttrs). Exactly singular pivots are nudged so that inverse
// iteration still gets a usable direction.
class TridiagonalLU {
 public:
  TridiagonalLU(std::vector<double> dl, std::vector<double> d, std::vector<double> du)
      : dl_(std::move(dl)), d_(std::move(d)), du_(std::move(du)) {
    const std::size_t N = d_.size();
    du2_.assign(N > 2 ? N - 2 : 0, 0.0);
    ipiv_.assign(N, 0);
    double scale = 0.0;
    for (double v : d_) scale = std::max(scale, std::abs(v));
    for (double v : dl_) scale = std::max(scale, std::abs(v));
    for (double v : du_) scale = std::max(scale, std::abs(v));
    const double tiny = std::numeric_limits<double>::epsilon() * (scale > 0.0 ? scale : 1.0);
    for (std::size_t i = 0; i + 1 < N; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] == 0.0) d_[i] = tiny;
        const double fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
        ipiv_[i] = 0;
      } else {
        const double fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const double temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < N) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        ipiv_[i] = 1;
      }
    }
    if (N > 0 && d_[N - 1] == 0.0) d_[N - 1] = tiny;
    for (double v : d_)
      if (!std::isfinite(v)) throw NumericalError("tridiagonal factorization produced non-finite pivots");
  }

  static TridiagonalLU symmetric(const SymmetricTridiagonal& A) {
    return TridiagonalLU(A.off, A.diag, A.off);
  }

  std::vector<double> solve(std::span<const double> b) const {
    const std::size_t N = d_.size();
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t i = 0; i + 1 < N; ++i) {
      if (ipiv_[i] == 0) {
        x[i + 1] -= dl_[i] * x[i];
      } else {
        const double temp = x[i];
        x[i] = x[i + 1];
        x[i + 1] = temp - dl_[i] * x[i];
      }
    }
    if (N == 0) return x;
    x[N - 1] /= d_[N - 1];
    if (N > 1) x[N - 2] = (x[N - 2] - du_[N - 2] * x[N - 1]) / d_[N - 2];
    for (std::size_t i = N - 2; i-- > 0;)
      x[i] = (x[i] - du_[i] * x[i + 1] - du2_[i] * x[i + 2]) / d_[i];
    return x;
  }

 private:
  std::vector<double> dl_, d_, du_, du2_;
  std::vector<int> ipiv_;
};

// Number of eigenvalues of A strictly below x (Sturm sequence count).
inline std::size_t sturm_count(const SymmetricTridiagonal& A, double x) {
  const std::size_t N = A.diag.size();
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double e2 = i > 0 ? A.off[i - 1] * A.off[i - 1] : 0.0;
    q = (A.diag[i] - x) - (i > 0 ? e2 / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

}  // namespace pmc
