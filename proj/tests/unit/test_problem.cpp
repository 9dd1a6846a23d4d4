#include <gtest/gtest.h>

#include <random>

#include "pmc/minimal_branch.hpp"
#include "pmc/problem.hpp"

using namespace pmc;

namespace {

ProblemSpec disc(double h, double eps0 = 0.1, int n = 2) {
  ProblemSpec s;
  s.n = n;
  s.R = 1.0;
  s.p = 2.0;
  s.H = CurvatureField::constant(h);
  s.eps0 = eps0;
  return s;
}

}  // namespace

TEST(EvalH, ConstantField) { EXPECT_DOUBLE_EQ(eval_H(disc(0.5), 0.3), 0.5); }

TEST(EvalH, Polynomial) {
  ProblemSpec s = disc(0.5);
  s.H = CurvatureField({0.5, 0.0, 0.1});
  EXPECT_NEAR(eval_H(s, 1.0), 0.6, 1e-15);
  EXPECT_NEAR(s.H.derivative(1.0), 0.2, 1e-15);
}

TEST(EvalH, OutOfRange) {
  EXPECT_THROW(eval_H(disc(0.5), 1.5), DomainError);
  EXPECT_THROW(eval_H(disc(0.5), -0.1), DomainError);
}

TEST(CurvatureField, RejectsBadCoefficients) {
  EXPECT_THROW(CurvatureField(std::vector<double>{}), ConfigurationError);
  EXPECT_THROW(CurvatureField(std::vector<double>(10, 1.0)), ConfigurationError);
  EXPECT_THROW(CurvatureField({1.0, std::nan("")}), ConfigurationError);
  EXPECT_NO_THROW(CurvatureField(std::vector<double>(9, 1.0)));
}

TEST(CurvatureField, TaylorShiftReproducesValues) {
  const CurvatureField H({0.3, -0.2, 0.7, 0.05, -0.1});
  const double m = 0.37;
  const auto d = H.shifted(m);
  for (double t : {-0.3, -0.1, 0.0, 0.2, 0.45}) {
    double acc = 0.0;
    for (std::size_t k = d.size(); k-- > 0;) acc = acc * t + d[k];
    EXPECT_NEAR(acc, H(m + t), 1e-14);
  }
}

TEST(ProblemSpec, Validation) {
  ProblemSpec s = disc(0.5);
  EXPECT_NO_THROW(s.validate());
  s.p = 0.5;
  EXPECT_THROW(s.validate(), ConfigurationError);
  s = disc(0.5);
  s.eps0 = 1.0;
  EXPECT_THROW(s.validate(), ConfigurationError);
  s = disc(0.5);
  s.tol.eig = 0.0;
  EXPECT_THROW(s.validate(), ConfigurationError);
  s = disc(0.5);
  s.n = 0;
  EXPECT_THROW(s.validate(), ConfigurationError);
}

TEST(Admissibility, ConstantDiscQuarter) {
  const ConditionReport r = check_admissibility(disc(0.5, 0.25));
  EXPECT_NEAR(r.interior_margin, 0.75, 1e-12);
  EXPECT_TRUE(r.boundary_strict_ok);
  EXPECT_TRUE(r.positivity_ok);
  EXPECT_TRUE(r.admissible);
  EXPECT_TRUE(r.ball_restricted);
}

TEST(Admissibility, HalfSphereIsMarginal) {
  const ConditionReport r = check_admissibility(disc(2.0, 0.1));
  EXPECT_NEAR(r.interior_margin, 0.0, 1e-12);
  EXPECT_FALSE(r.admissible);
}

TEST(Admissibility, ThreeDimensionalBall) {
  // int_0^r s^2 ds / r^2 = r / 3
  const ConditionReport r = check_admissibility(disc(1.0, 0.2, 3));
  EXPECT_NEAR(r.interior_margin, 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(r.boundary_strict_ok);
  EXPECT_TRUE(r.admissible);
}

TEST(Admissibility, MarginMatchesClosedFormForConstants) {
  for (int n : {1, 2, 3, 5})
    for (double h : {0.1, 0.4, 0.9}) {
      ProblemSpec s = disc(h, 0.1, n);
      s.R = 0.8;
      EXPECT_NEAR(check_admissibility(s).interior_margin, 1.0 - h * s.R / n, 1e-12);
    }
}

TEST(Admissibility, MarginMonotoneInCoefficients) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> c{U(rng) + 0.05, U(rng), U(rng), U(rng)};
    ProblemSpec a = disc(0.5);
    a.H = CurvatureField(c);
    const int k = trial % 4;
    c[k] += U(rng);
    ProblemSpec b = a;
    b.H = CurvatureField(c);
    EXPECT_LE(check_admissibility(b).interior_margin, check_admissibility(a).interior_margin);
  }
}

TEST(Admissibility, PositivityDetectsInteriorDip) {
  ProblemSpec s = disc(0.5);
  // H(r) = (r - 0.5)^2 + 0.001 stays positive; shifting it down by 0.002 does not
  s.H = CurvatureField({0.251, -1.0, 1.0});
  EXPECT_TRUE(check_admissibility(s).positivity_ok);
  s.H = CurvatureField({0.249, -1.0, 1.0});
  EXPECT_FALSE(check_admissibility(s).positivity_ok);
}

TEST(Admissibility, NonPositiveConstantRejected) {
  ProblemSpec s = disc(0.5);
  s.H = CurvatureField::constant(0.0);
  EXPECT_FALSE(check_admissibility(s).positivity_ok);
  EXPECT_FALSE(check_admissibility(s).admissible);
}

TEST(Admissibility, AdmissibleImpliesSolvableAtZero) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.05, 1.5);
  int admissible = 0;
  for (int trial = 0; trial < 40; ++trial) {
    ProblemSpec s = disc(U(rng), 0.1, 1 + trial % 3);
    s.H = CurvatureField({U(rng), -0.2 * U(rng), 0.1 * U(rng)});
    if (!check_admissibility(s).admissible) continue;
    ++admissible;
    EXPECT_TRUE(picard_minimal(s, build_grid(s, 64), 0.0).converged);
  }
  EXPECT_GT(admissible, 5);
}

TEST(Nonlinearity, OddPowerAndDerivatives) {
  EXPECT_DOUBLE_EQ(nonlinearity(2.0, -3.0), -9.0);
  EXPECT_DOUBLE_EQ(nonlinearity(1.0, -3.0), -3.0);
  EXPECT_NEAR(nonlinearity(2.5, 4.0), 32.0, 1e-12);
  EXPECT_NEAR(nonlinearity_d1(2.5, 4.0), 2.5 * 8.0, 1e-12);
  EXPECT_NEAR(nonlinearity_d2(2.5, 4.0), 2.5 * 1.5 * 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(nonlinearity_d2(2.0, 0.3), 2.0);
}
