#include "nsch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scheme_kernel.hpp"

namespace nsch {

namespace {

template <class F>
void for_each_point(const Discretization& d, F&& f) {
  ElementValues ev;
  for (int t = 0; t < d.space().num_elements(); ++t) {
    ev.reinit(d.space(), d.rule(), t);
    for (std::size_t q = 0; q < ev.jxw.size(); ++q) f(ev, q);
  }
}

void check_state(const Discretization& d, const State& s) {
  if (static_cast<int>(s.x.size()) != d.size()) {
    throw std::invalid_argument("diagnostics: state does not belong to this mesh");
  }
}

}  // namespace

EnergyBreakdown energy(const Discretization& d, const State& s) {
  check_state(d, s);
  const PhysParams& ph = d.phys();
  const int n = d.num_dofs();
  EnergyBreakdown e;
  for_each_point(d, [&](const ElementValues& ev, std::size_t q) {
    const auto pf = kernel::eval_point<double>(ev, q, kernel::gather(ev, s.x, n));
    const double c = pf.v[kC];
    const double rho = density(c, ph);
    const double jw = ev.jxw[q];
    const double g2 = pf.g[kC][0] * pf.g[kC][0] + pf.g[kC][1] * pf.g[kC][1];
    e.kinetic += jw * 0.5 * (pf.v[kUx] * pf.v[kUx] + pf.v[kUy] * pf.v[kUy]);
    e.mixing += jw * rho * double_well(c) / ph.M();
    e.gradient += jw * 0.5 * ph.C() / ph.M() * rho * g2;
    e.potential += jw * ph.invFr2() * rho * ev.x[q].y;
  });
  e.total = e.kinetic + e.mixing + e.gradient + e.potential;
  return e;
}

LawReport law_report(const Discretization& d, const State& prev, const State& cand, double dt) {
  if (static_cast<int>(prev.x.size()) != d.size() || static_cast<int>(cand.x.size()) != d.size()) {
    throw std::invalid_argument("law_report: states must share the discretization's mesh");
  }
  if (!(dt > 0)) throw std::invalid_argument("law_report: dt must be positive");
  const PhysParams& ph = d.phys();
  const int n = d.num_dofs();
  LawReport r;
  for_each_point(d, [&](const ElementValues& ev, std::size_t q) {
    const auto k = kernel::composite(
        kernel::eval_point<double>(ev, q, kernel::gather(ev, cand.x, n)),
        kernel::eval_point<double>(ev, q, kernel::gather(ev, prev.x, n)), ph, dt);
    const double jw = ev.jxw[q];
    double gw2 = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) gw2 += k.gw[i][j] * k.gw[i][j];
    }
    r.viscous += jw * gw2 / ph.Re();
    r.divergence += jw * k.div_w * k.div_w / (3.0 * ph.Re());
    r.chemical += jw * (k.gmu_half[0] * k.gmu_half[0] + k.gmu_half[1] * k.gmu_half[1]) /
                  (ph.M() * ph.Pe());
  });
  r.rate = (energy(d, cand).total - energy(d, prev).total) / dt;
  r.residual = std::abs(r.rate + r.dissipation());
  return r;
}

double volume(const Discretization& d, const State& s) {
  check_state(d, s);
  auto c = s.field(kC);
  double v = 0.0;
  for_each_point(d, [&](const ElementValues& ev, std::size_t q) {
    double cv = 0.0;
    for (int a = 0; a < 6; ++a) cv += ev.phi[q][a] * c[ev.dofs[a]];
    v += ev.jxw[q] * cv;
  });
  return v;
}

double mass(const Discretization& d, const State& s) {
  check_state(d, s);
  auto c = s.field(kC);
  double m = 0.0;
  for_each_point(d, [&](const ElementValues& ev, std::size_t q) {
    double cv = 0.0;
    for (int a = 0; a < 6; ++a) cv += ev.phi[q][a] * c[ev.dofs[a]];
    m += ev.jxw[q] * density(cv, d.phys());
  });
  return m;
}

Point centroid(const Discretization& d, const State& s) {
  check_state(d, s);
  auto c = s.field(kC);
  double m = 0.0, mx = 0.0, my = 0.0;
  for_each_point(d, [&](const ElementValues& ev, std::size_t q) {
    double cv = 0.0;
    for (int a = 0; a < 6; ++a) cv += ev.phi[q][a] * c[ev.dofs[a]];
    m += ev.jxw[q] * cv;
    mx += ev.jxw[q] * cv * ev.x[q].x;
    my += ev.jxw[q] * cv * ev.x[q].y;
  });
  if (m == 0.0) throw std::domain_error("centroid: integral of c is zero");
  return {mx / m, my / m};
}

Vector divergence_field(const Discretization& d, const State& s) {
  check_state(d, s);
  const PhysParams& ph = d.phys();
  const int n = d.num_dofs();
  SparseMatrix m;
  Vector b;
  // div(u~/sqrt(rho)) = div u~ / sqrt(rho) + (alpha/2) sqrt(rho) u~ . grad c
  assemble(
      d.scalar_pattern(), d.rule(),
      [&](const ElementValues& ev, LocalSystem& loc) {
        const auto coef = kernel::gather(ev, s.x, n);
        for (std::size_t q = 0; q < ev.jxw.size(); ++q) {
          const auto pf = kernel::eval_point<double>(ev, q, coef);
          const double sr = std::sqrt(density(pf.v[kC], ph));
          const double div = (pf.g[kUx][0] + pf.g[kUy][1]) / sr +
                             0.5 * ph.alpha() * sr *
                                 (pf.v[kUx] * pf.g[kC][0] + pf.v[kUy] * pf.g[kC][1]);
          const double jw = ev.jxw[q];
          for (int a = 0; a < 6; ++a) {
            loc.vec[a] += jw * div * ev.phi[q][a];
            for (int bb = 0; bb < 6; ++bb) loc.A(a, bb) += jw * ev.phi[q][a] * ev.phi[q][bb];
          }
        }
      },
      &m, &b, Exec::serial);
  return solve_sparse(m, b);
}

BandSplit split_by_band(std::span<const double> c, std::span<const double> v, double half_width) {
  if (c.size() != v.size()) throw std::invalid_argument("split_by_band: size mismatch");
  BandSplit s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    double& m = std::abs(c[i] - 0.5) < half_width ? s.band : s.bulk;
    m = std::max(m, std::abs(v[i]));
  }
  return s;
}

std::vector<std::vector<double>> fd_weights(double x0, std::span<const double> x, int m) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0, c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

double surface_tension_1d(const PhysParams& p, std::span<const double> z,
                          std::span<const double> c) {
  constexpr int kStencil = 9;
  const std::size_t n = z.size();
  if (c.size() != n) throw std::invalid_argument("surface_tension_1d: size mismatch");
  if (n < kStencil) throw std::invalid_argument("surface_tension_1d: need at least 9 samples");
  const double h = (z[n - 1] - z[0]) / double(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(z[i] - z[i - 1] - h) > 1e-9 * std::abs(h)) {
      throw std::invalid_argument("surface_tension_1d: grid must be uniform");
    }
  }
  auto saturated = [](double v) { return std::min(std::abs(v), std::abs(v - 1.0)) <= 1e-6; };
  if (!saturated(c.front()) || !saturated(c.back())) {
    std::ostringstream os;
    os << "surface_tension_1d: profile tails not saturated (c = " << c.front() << ", "
       << c.back() << ")";
    throw SaturationError(os.str());
  }
  // Stencil weights depend only on the offset pattern on a uniform grid.
  std::vector<double> offs(kStencil);
  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t first =
        std::min(i >= kStencil / 2 ? i - kStencil / 2 : 0, n - kStencil);
    for (int j = 0; j < kStencil; ++j) offs[j] = z[first + j];
    const auto w = fd_weights(z[i], offs, 1);
    double dc = 0.0;
    for (int j = 0; j < kStencil; ++j) dc += w[1][j] * c[first + j];
    integrand[i] = density(c[i], p) * dc * dc;
  }
  std::size_t panels = n - 1;
  double sum = 0.0;
  if (panels % 2 == 1) {
    sum += 0.5 * h * (integrand[n - 2] + integrand[n - 1]);
    --panels;
  }
  double s = integrand[0] + integrand[panels];
  for (std::size_t i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * integrand[i];
  sum += s * h / 3.0;
  return p.C() / p.M() * sum;
}

}  // namespace nsch
