#pragma once

// Pointwise integrands of the scheme, templated on the scalar type of the
// candidate coefficients so that the same code yields the residual (double)
// and its Jacobian (forward-mode jets). The energy diagnostics read the
// composites from here too.

#include <array>
#include <cmath>

#include "nsch/fem.hpp"
#include "nsch/physics.hpp"
#include "nsch/scheme.hpp"

namespace nsch::kernel {

inline constexpr int kLocal = 6 * kNumFields;

template <class T>
struct PointFields {
  std::array<T, kNumFields> v;
  std::array<std::array<T, 2>, kNumFields> g;
};

/// Values and gradients of the five fields at quadrature point q. Sums run
/// over differences to the first coefficient so constants come out exact.
template <class T, class Coef>
PointFields<T> eval_point(const ElementValues& ev, std::size_t q, const Coef& coef) {
  PointFields<T> out;
  for (int f = 0; f < kNumFields; ++f) {
    const auto& base = coef[6 * f];
    T v(0.0), gx(0.0), gy(0.0);
    for (int a = 0; a < 6; ++a) {
      const auto cf = coef[6 * f + a] - base;
      v += ev.phi[q][a] * cf;
      gx += ev.grad[q][a][0] * cf;
      gy += ev.grad[q][a][1] * cf;
    }
    out.v[f] = v + base;
    out.g[f] = {gx, gy};
  }
  return out;
}

template <class T>
struct Composite {
  T c1, c0;
  std::array<T, 2> gc1, gc0;
  T rho1, rho0, rho_half, sqrt_half, rho_prod;
  std::array<T, 2> w;
  std::array<std::array<T, 2>, 2> gw;  // gw[k][d] = d w_k / dx_d
  T div_w;
  std::array<T, 2> w_t;
  T c_half, mu_half, c_t, p;
  std::array<T, 2> gc_half, gmu_half, gp;
  std::array<T, 2> grad_rho_half;     // grad rho^{n+1/2}
  std::array<T, 2> grad_rho_alpha;    // grad rho^{n+1/2} / alpha, alpha-free form
};

/// Composite fields from candidate (n+1) and previous (n) point values.
/// p~ is read from the candidate only: it is the half-level unknown.
template <class T>
Composite<T> composite(const PointFields<T>& n1, const PointFields<double>& n0,
                       const PhysParams& phys, double dt) {
  using std::sqrt;
  const double alpha = phys.alpha();
  Composite<T> k;
  k.c1 = n1.v[kC];
  k.c0 = T(n0.v[kC]);
  k.gc1 = n1.g[kC];
  k.gc0 = {T(n0.g[kC][0]), T(n0.g[kC][1])};
  k.rho1 = density(k.c1, phys);
  k.rho0 = density(k.c0, phys);
  k.rho_half = 0.5 * (k.rho1 + k.rho0);
  k.rho_prod = k.rho1 * k.rho0;
  const T s1 = sqrt(k.rho1), s0 = sqrt(k.rho0);
  const T S = s1 + s0;
  k.sqrt_half = 0.5 * S;
  // grad sqrt(rho) = -(alpha/2) rho^{3/2} grad c
  std::array<T, 2> gS;
  for (int d = 0; d < 2; ++d) {
    gS[d] = -0.5 * alpha * (k.rho1 * s1 * k.gc1[d] + k.rho0 * s0 * k.gc0[d]);
  }
  for (int i = 0; i < 2; ++i) {
    const Field f = i == 0 ? kUx : kUy;
    const T sum = n1.v[f] + n0.v[f];
    k.w[i] = sum / S;
    k.w_t[i] = (n1.v[f] - n0.v[f]) / dt;
    for (int d = 0; d < 2; ++d) k.gw[i][d] = (n1.g[f][d] + n0.g[f][d]) / S - k.w[i] * gS[d] / S;
  }
  k.div_w = k.gw[0][0] + k.gw[1][1];
  k.c_half = 0.5 * (k.c1 + k.c0);
  k.mu_half = 0.5 * (n1.v[kMu] + n0.v[kMu]);
  k.c_t = (k.c1 - k.c0) / dt;
  k.p = n1.v[kP];
  for (int d = 0; d < 2; ++d) {
    k.gc_half[d] = 0.5 * (k.gc1[d] + k.gc0[d]);
    k.gmu_half[d] = 0.5 * (n1.g[kMu][d] + n0.g[kMu][d]);
    k.gp[d] = n1.g[kP][d];
    k.grad_rho_alpha[d] = -0.5 * (k.rho1 * k.rho1 * k.gc1[d] + k.rho0 * k.rho0 * k.gc0[d]);
    k.grad_rho_half[d] = alpha * k.grad_rho_alpha[d];
  }
  return k;
}

/// Integrand of each equation as a * phi + b . grad(phi).
template <class T>
struct Integrand {
  std::array<T, kNumFields> a;
  std::array<std::array<T, 2>, kNumFields> b;
};

/// Rows are indexed by Field: kUx/kUy momentum, kP continuity, kC phase
/// transport, kMu chemical potential. All terms are moved to one side.
template <class T>
Integrand<T> integrand(const Composite<T>& k, const PhysParams& ph, double y, bool midpoint_f) {
  const double invM = 1.0 / ph.M(), invRe = 1.0 / ph.Re(), invPe = 1.0 / ph.Pe();
  const double g2 = ph.invFr2(), rho_ref = ph.rho0(), alpha = ph.alpha();
  Integrand<T> it;

  // continuity: -w . grad q + (alpha/Pe) grad mu . grad q
  it.a[kP] = T(0.0);
  for (int d = 0; d < 2; ++d) it.b[kP][d] = -k.w[d] + (alpha * invPe) * k.gmu_half[d];

  // momentum
  const T div_rho_w = k.grad_rho_half[0] * k.w[0] + k.grad_rho_half[1] * k.w[1] +
                      k.rho_half * k.div_w;
  for (int i = 0; i < 2; ++i) {
    const Field f = i == 0 ? kUx : kUy;
    const T conv = k.w[0] * k.gw[i][0] + k.w[1] * k.gw[i][1];
    T a = k.sqrt_half * k.w_t[i] + k.rho_half * conv + 0.5 * div_rho_w * k.w[i] +
          invM * k.rho_half * k.gp[i] + invM * k.grad_rho_alpha[i] * k.mu_half / k.rho_half +
          (g2 * rho_ref) * y * k.grad_rho_half[i] / k.rho_half;
    if (i == 1) a += g2 * (k.rho_half - rho_ref);
    it.a[f] = a;
    for (int d = 0; d < 2; ++d) it.b[f][d] = invRe * k.gw[i][d];
    it.b[f][i] += (invRe / 3.0) * k.div_w;
  }

  // phase transport; -r / alpha = rho^{n+1} rho^n
  const T wgc1 = k.w[0] * k.gc1[0] + k.w[1] * k.gc1[1];
  const T wgc0 = k.w[0] * k.gc0[0] + k.w[1] * k.gc0[1];
  it.a[kC] = k.rho_prod / k.rho_half * k.c_t +
             (k.rho1 * k.rho1 * wgc1 + k.rho0 * k.rho0 * wgc0) / (2.0 * k.rho_half);
  for (int d = 0; d < 2; ++d) it.b[kC][d] = invPe * k.gmu_half[d];

  // chemical potential
  const T r = r_secant(k.c1, k.c0, ph);
  const T g = midpoint_f ? double_well_prime(k.c_half) : g_secant(k.c1, k.c0);
  const T f_avg = 0.5 * (double_well(k.c1) + double_well(k.c0));
  const T gc2 = k.gc1[0] * k.gc1[0] + k.gc1[1] * k.gc1[1] + k.gc0[0] * k.gc0[0] +
                k.gc0[1] * k.gc0[1];
  it.a[kMu] = k.rho_prod / k.rho_half * k.mu_half - k.rho_half * g + r * k.p - f_avg * r -
              (0.25 * ph.C()) * gc2 * r - r / k.rho_half * (ph.M() * rho_ref * g2) * y;
  for (int d = 0; d < 2; ++d) it.b[kMu][d] = -ph.C() * k.rho_half * k.gc_half[d];
  return it;
}

/// Local residual of one element.
template <class T, class Coef>
void element_residual(const ElementValues& ev, const PhysParams& ph, double dt, bool midpoint_f,
                      const Coef& cand, const std::array<double, kLocal>& prev,
                      std::array<T, kLocal>& out) {
  for (auto& o : out) o = T(0.0);
  for (std::size_t q = 0; q < ev.jxw.size(); ++q) {
    const auto n1 = eval_point<T>(ev, q, cand);
    const auto n0 = eval_point<double>(ev, q, prev);
    const auto k = composite(n1, n0, ph, dt);
    const auto it = integrand(k, ph, ev.x[q].y, midpoint_f);
    const double jw = ev.jxw[q];
    for (int f = 0; f < kNumFields; ++f) {
      const T a = jw * it.a[f];
      const T bx = jw * it.b[f][0];
      const T by = jw * it.b[f][1];
      for (int m = 0; m < 6; ++m) {
        out[6 * f + m] += a * ev.phi[q][m] + bx * ev.grad[q][m][0] + by * ev.grad[q][m][1];
      }
    }
  }
}

template <class V>
std::array<double, kLocal> gather(const ElementValues& ev, const V& x, int n) {
  std::array<double, kLocal> out;
  for (int f = 0; f < kNumFields; ++f) {
    for (int a = 0; a < 6; ++a) out[6 * f + a] = x[std::size_t(f) * n + ev.dofs[a]];
  }
  return out;
}

}  // namespace nsch::kernel
