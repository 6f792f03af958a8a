#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nsch/physics.hpp"

using namespace nsch;

namespace {

PhysParams pair(double rho1, double rho2) {
  PhysConstants k;
  k.rho1 = rho1;
  k.rho2 = rho2;
  return PhysParams(k);
}

// |lhs - rhs| measured against the size of the terms that are differenced
double secant_error(double a1, double a0, double lhs, double rhs) {
  const double scale = std::max({std::abs(a1) + std::abs(a0), std::abs(lhs), 1e-300});
  return std::abs(lhs - rhs) / scale;
}

}  // namespace

TEST(Density, EndpointsAndHarmonicMean) {
  const auto p = pair(1.0, 10.0);
  EXPECT_DOUBLE_EQ(density(1.0, p), 1.0);
  EXPECT_DOUBLE_EQ(density(0.0, p), 10.0);
  // 1/rho = 0.5/1 + 0.5/10
  EXPECT_NEAR(density(0.5, p), 1.0 / 0.55, 1e-14);
}

TEST(Density, AlphaIsStoredFromConstants) {
  EXPECT_EQ(pair(1.0, 1.0).alpha(), 0.0);
  EXPECT_DOUBLE_EQ(pair(1.0, 10.0).alpha(), 0.9);
  EXPECT_DOUBLE_EQ(pair(1.0, 50.0).alpha(), 49.0 / 50.0);
}

TEST(Density, StaysBetweenPureDensitiesOnUnitInterval) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto [r1, r2] : {std::pair{1.0, 10.0}, std::pair{1.0, 50.0}, std::pair{3.0, 2.0}}) {
    const auto p = pair(r1, r2);
    for (int i = 0; i < 1000; ++i) {
      const double rho = density(u(rng), p);
      EXPECT_GE(rho, std::min(r1, r2) * (1 - 1e-15));
      EXPECT_LE(rho, std::max(r1, r2) * (1 + 1e-15));
    }
  }
}

TEST(Density, DerivativeIsMinusAlphaRhoSquared) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-0.05, 1.05);
  const auto p = pair(1.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double c = u(rng);
    const double rho = density(c, p);
    EXPECT_NEAR(drho_dc(c, p), -p.alpha() * rho * rho, 1e-13 * rho * rho);
    const double h = 1e-6;
    const double fd = (density(c + h, p) - density(c - h, p)) / (2 * h);
    EXPECT_NEAR(drho_dc(c, p), fd, 1e-6 * std::abs(fd));
  }
  EXPECT_EQ(drho_dc(0.3, pair(2.0, 2.0)), 0.0);
}

TEST(Density, FloorRaisesInsteadOfFlippingSign) {
  const auto p = pair(1.0, 10.0);
  // (rho2 - rho1) c + rho1 = 0 at c = -1/9
  EXPECT_THROW(density(-1.0 / 9.0, p), DensityFloorError);
  EXPECT_THROW(r_secant(0.5, -1.0 / 9.0, p), DensityFloorError);
  try {
    density(-1.0 / 9.0, p);
  } catch (const DensityFloorError& e) {
    EXPECT_DOUBLE_EQ(e.concentration(), -1.0 / 9.0);
  }
  // overshoots short of the pole are evaluated as they are
  EXPECT_GT(density(-0.05, p), 10.0);
  EXPECT_LT(density(1.2, p), 1.0);
}

TEST(PhysParams, RejectsNonPhysicalConstants) {
  PhysConstants k;
  k.rho1 = 0.0;
  EXPECT_THROW(PhysParams{k}, std::invalid_argument);
  k = {};
  k.M = -1.0;
  EXPECT_THROW(PhysParams{k}, std::invalid_argument);
  k = {};
  k.invFr2 = -0.1;
  EXPECT_THROW(PhysParams{k}, std::invalid_argument);
  k = {};
  k.C = 0.0;
  EXPECT_THROW(PhysParams{k}, std::invalid_argument);
}

TEST(DoubleWell, MinimaAndSymmetryPoint) {
  EXPECT_EQ(double_well(0.0), 0.0);
  EXPECT_EQ(double_well(1.0), 0.0);
  EXPECT_EQ(double_well_prime(0.0), 0.0);
  EXPECT_EQ(double_well_prime(1.0), 0.0);
  EXPECT_EQ(double_well_prime(0.5), 0.0);
  EXPECT_DOUBLE_EQ(double_well(0.5), 0.015625);
}

TEST(DoubleWell, DerivativeMatchesCentralDifferences) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int i = 0; i < 20; ++i) {
    const double c = u(rng);
    const double h = 1e-5;
    const double fd = (double_well(c + h) - double_well(c - h)) / (2 * h);
    EXPECT_NEAR(double_well_prime(c), fd, 1e-6 * std::max(std::abs(fd), 1e-3)) << "c = " << c;
  }
}

TEST(Secant, DegeneratesToDerivative) {
  const auto p = pair(1.0, 10.0);
  for (double c : {-0.1, 0.0, 0.25, 0.5, 0.9, 1.0, 1.1}) {
    EXPECT_NEAR(g_secant(c, c), double_well_prime(c), 1e-15);
    EXPECT_NEAR(r_secant(c, c, p), drho_dc(c, p), 1e-13 * std::abs(drho_dc(c, p)));
  }
  EXPECT_EQ(g_secant(1.0, 0.0), 0.0);
  EXPECT_EQ(r_secant(0.2, 0.7, pair(1.0, 1.0)), 0.0);
}

TEST(Secant, SymmetricInArguments) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto p = pair(1.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng);
    EXPECT_EQ(g_secant(a, b), g_secant(b, a));
    EXPECT_EQ(r_secant(a, b, p), r_secant(b, a, p));
  }
}

TEST(Secant, IdentitiesAtRandomPairs) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double rho2 : {1.0, 10.0, 50.0}) {
    const auto p = pair(1.0, rho2);
    double worst_f = 0.0, worst_rho = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double c1 = u(rng), c0 = u(rng);
      worst_f = std::max(worst_f, secant_error(double_well(c1), double_well(c0),
                                               double_well(c1) - double_well(c0),
                                               g_secant(c1, c0) * (c1 - c0)));
      worst_rho = std::max(worst_rho, secant_error(density(c1, p), density(c0, p),
                                                   density(c1, p) - density(c0, p),
                                                   r_secant(c1, c0, p) * (c1 - c0)));
    }
    EXPECT_LT(worst_f, 1e-12) << "rho2 = " << rho2;
    EXPECT_LT(worst_rho, 1e-12) << "rho2 = " << rho2;
  }
}

TEST(Secant, IdentitiesSurviveOvershoots) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(-0.05, 1.05);
  const auto p = pair(1.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double c1 = u(rng), c0 = u(rng);
    EXPECT_LT(secant_error(double_well(c1), double_well(c0), double_well(c1) - double_well(c0),
                           g_secant(c1, c0) * (c1 - c0)),
              1e-12);
    EXPECT_LT(secant_error(density(c1, p), density(c0, p), density(c1, p) - density(c0, p),
                           r_secant(c1, c0, p) * (c1 - c0)),
              1e-12);
  }
}
