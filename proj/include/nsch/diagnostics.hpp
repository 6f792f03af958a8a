#pragma once

// Energy bookkeeping and observables of a state.

#include <span>
#include <stdexcept>
#include <vector>

#include "nsch/physics.hpp"
#include "nsch/scheme.hpp"

namespace nsch {

struct EnergyBreakdown {
  double kinetic = 0.0;    // 1/2 |sqrt(rho) u|^2 = 1/2 |u~|^2
  double mixing = 0.0;     // (1/M) rho F(c)
  double gradient = 0.0;   // (C/2M) rho |grad c|^2
  double potential = 0.0;  // (1/Fr^2) rho y
  double total = 0.0;
};

EnergyBreakdown energy(const Discretization& d, const State& s);

struct LawReport {
  double rate = 0.0;       // (E^{n+1} - E^n) / dt
  double viscous = 0.0;    // (1/Re) |grad w|^2
  double divergence = 0.0; // (1/3Re) |div w|^2
  double chemical = 0.0;   // (1/(M Pe)) |grad mu^{n+1/2}|^2
  double residual = 0.0;   // |rate + dissipation|

  double dissipation() const { return viscous + divergence + chemical; }
};

/// Discrete energy balance of the step prev -> cand on one mesh.
LawReport law_report(const Discretization& d, const State& prev, const State& cand, double dt);

/// Integral of c.
double volume(const Discretization& d, const State& s);
/// Integral of rho(c).
double mass(const Discretization& d, const State& s);
/// Centre of c: (integral of c x) / (integral of c).
Point centroid(const Discretization& d, const State& s);

/// L2 projection of div u, u = u~ / sqrt(rho(c)), onto the P2 space.
Vector divergence_field(const Discretization& d, const State& s);

struct BandSplit {
  double band = 0.0;  // max |v| at dofs with |c - 1/2| < half_width
  double bulk = 0.0;  // max |v| elsewhere
};
BandSplit split_by_band(std::span<const double> c, std::span<const double> v,
                        double half_width = 0.45);

class SaturationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// sigma = (C/M) * integral of rho(c) (dc/dz)^2 over a uniformly sampled 1D
/// profile. Derivatives use 8th-order finite-difference stencils, the integral
/// composite Simpson (trapezoid on the last panel if the panel count is odd).
/// Throws SaturationError unless both ends are within 1e-6 of 0 or 1.
double surface_tension_1d(const PhysParams& p, std::span<const double> z,
                          std::span<const double> c);

/// Finite-difference weights for derivatives 0..m at x0 on nodes x (Fornberg).
/// Returns weights[k][j] for derivative k and node j.
std::vector<std::vector<double>> fd_weights(double x0, std::span<const double> x, int m);

}  // namespace nsch
