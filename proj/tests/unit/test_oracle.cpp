#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracle/shooting.hpp"

TEST(ShootingOracle, ReproducesSphericalCap) {
  // lambda = 0 and constant H: a cap of radius n / H
  oracle::Problem pb;
  pb.H = {0.5};
  const double a = 0.25;
  EXPECT_NEAR(oracle::base_height(pb), (1 - std::sqrt(1 - a * a)) / a, 1e-9);
  pb.n = 3;
  pb.H = {1.5};
  EXPECT_NEAR(oracle::base_height(pb), (1 - std::sqrt(1 - 0.25)) / 0.5, 1e-9);
}

TEST(ShootingOracle, CapProfile) {
  oracle::Problem pb;
  pb.H = {1.0};
  const double a = 0.5, top = (1 - std::sqrt(1 - a * a)) / a;
  const auto shot = oracle::shoot(pb, top, {0.25, 0.5, 0.75, 1.0});
  ASSERT_TRUE(shot.reached_boundary);
  for (std::size_t k = 0; k < shot.r.size(); ++k) {
    const double r = shot.r[k];
    EXPECT_NEAR(shot.u[k], (std::sqrt(1 - a * a * r * r) - std::sqrt(1 - a * a)) / a, 1e-9);
  }
}

TEST(ShootingOracle, FixtureBaseHeights) {
  EXPECT_NEAR(fixtures::disc_quadratic.base_height, (1 - std::sqrt(1 - 0.0625)) / 0.25, 1e-10);
  EXPECT_NEAR(fixtures::interval_linear.base_height, 1 - std::sqrt(0.75), 1e-10);
}
