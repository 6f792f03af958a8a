#pragma once

// Closures of the quasi-incompressible two-phase model: harmonic density,
// double-well potential and the two-point secant averages used by the
// time-discrete scheme.

#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace nsch {

/// Raised when the harmonic-density denominator (rho2-rho1)c + rho1 gets
/// closer to zero than kDensityFloor.
class DensityFloorError : public std::domain_error {
 public:
  DensityFloorError(double c, double denominator);
  double concentration() const { return c_; }

 private:
  double c_;
};

inline constexpr double kDensityFloor = 1e-12;

/// Plain nondimensional constants as read from configuration.
struct PhysConstants {
  double rho1 = 1.0;    // density of fluid 1 (c = 1)
  double rho2 = 1.0;    // density of fluid 2 (c = 0)
  double rho0 = 1.0;    // reference density in the buoyancy term
  double Re = 1.0;
  double Pe = 1.0;
  double M = 1.0;
  double C = 1.0;
  double invFr2 = 0.0;  // 1/Fr^2
  double eps = 0.01;    // interface width of the initial profiles

  bool operator==(const PhysConstants&) const = default;
};

/// Validated model parameters. alpha is derived once on construction.
class PhysParams {
 public:
  explicit PhysParams(const PhysConstants& k);

  const PhysConstants& constants() const { return k_; }
  double rho1() const { return k_.rho1; }
  double rho2() const { return k_.rho2; }
  double rho0() const { return k_.rho0; }
  double Re() const { return k_.Re; }
  double Pe() const { return k_.Pe; }
  double M() const { return k_.M; }
  double C() const { return k_.C; }
  double invFr2() const { return k_.invFr2; }
  double eps() const { return k_.eps; }
  /// (rho2 - rho1) / (rho1 rho2)
  double alpha() const { return alpha_; }

 private:
  PhysConstants k_;
  double alpha_;
};

template <class T>
double value_of(const T& x) {
  if constexpr (std::is_arithmetic_v<T>) {
    return x;
  } else {
    return x.a;  // ceres::Jet and look-alikes
  }
}

namespace detail {
template <class T>
T density_denominator(const T& c, const PhysParams& p) {
  T d = (p.rho2() - p.rho1()) * c + p.rho1();
  if (std::abs(value_of(d)) < kDensityFloor) {
    throw DensityFloorError(value_of(c), value_of(d));
  }
  return d;
}
}  // namespace detail

/// rho(c) = rho1 rho2 / ((rho2 - rho1) c + rho1), i.e. 1/rho = c/rho1 + (1-c)/rho2.
template <class T>
T density(const T& c, const PhysParams& p) {
  return (p.rho1() * p.rho2()) / detail::density_denominator(c, p);
}

/// d rho / dc = -alpha rho^2.
template <class T>
T drho_dc(const T& c, const PhysParams& p) {
  T rho = density(c, p);
  return -p.alpha() * rho * rho;
}

/// F(c) = c^2 (c-1)^2 / 4
template <class T>
T double_well(const T& c) {
  T a = c * (c - 1.0);
  return 0.25 * a * a;
}

/// f(c) = F'(c) = c (c-1) (c-1/2)
template <class T>
T double_well_prime(const T& c) {
  return c * (c - 1.0) * (c - 0.5);
}

/// Secant of F: F(c1) - F(c0) = g_secant(c1, c0) (c1 - c0).
template <class T, class U>
auto g_secant(const T& c1, const U& c0) {
  return 0.25 * (c1 * (c1 - 1.0) + c0 * (c0 - 1.0)) * (c1 + c0 - 1.0);
}

/// Secant of rho: rho(c1) - rho(c0) = r_secant(c1, c0) (c1 - c0).
template <class T, class U>
auto r_secant(const T& c1, const U& c0, const PhysParams& p) {
  const double drho = p.rho2() - p.rho1();
  return -(p.rho1() * p.rho2() * drho) /
         (detail::density_denominator(c1, p) * detail::density_denominator(c0, p));
}

}  // namespace nsch
