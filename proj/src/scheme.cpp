#include "nsch/scheme.hpp"

#include <ceres/jet.h>

#include <algorithm>
#include <cmath>

#include "scheme_kernel.hpp"

namespace nsch {

using Jet = ceres::Jet<double, kernel::kLocal>;

Discretization::Discretization(std::shared_ptr<const P2Space> space, const PhysParams& phys,
                               SchemeOptions opts)
    : space_(std::move(space)),
      phys_(phys),
      opts_(opts),
      rule_(std::make_shared<const QuadratureRule>(quadrature(opts.quadrature_degree))),
      pattern_(space_, kNumFields),
      scalar_pattern_(space_, 1) {
  const int n = space_->num_dofs();
  for (int dof : space_->boundary_dofs(Marker::wall)) {
    constrained_.push_back(kUx * n + dof);
    constrained_.push_back(kUy * n + dof);
  }
  // The continuity rows sum to zero (test function 1), so one p~ dof is fixed.
  constrained_.push_back(kP * n + 0);
  std::sort(constrained_.begin(), constrained_.end());
  mass_ = assemble_mass(scalar_pattern_, *rule_);
  h1_ = mass_;
  SparseMatrix k = assemble_stiffness(scalar_pattern_, *rule_);
  for (std::size_t i = 0; i < h1_.values().size(); ++i) h1_.values()[i] += k.values()[i];
}

State State::zeros(int num_dofs, double t) {
  State s;
  s.t = t;
  s.x.assign(std::size_t(kNumFields) * num_dofs, 0.0);
  return s;
}

namespace {

void check_states(const Discretization& d, const State& prev, const State& cand, double dt) {
  if (static_cast<int>(prev.x.size()) != d.size() || static_cast<int>(cand.x.size()) != d.size()) {
    throw std::invalid_argument("scheme: state size does not match the discretization");
  }
  if (!(dt > 0)) throw std::invalid_argument("scheme: dt must be positive");
}

}  // namespace

CompositeValues composite_fields(const Discretization& d, const State& prev, const State& cand,
                                 double dt, int t, int q) {
  check_states(d, prev, cand, dt);
  ElementValues ev;
  ev.reinit(d.space(), d.rule(), t);
  const int n = d.num_dofs();
  const auto c1 = kernel::gather(ev, cand.x, n);
  const auto c0 = kernel::gather(ev, prev.x, n);
  const auto k = kernel::composite(kernel::eval_point<double>(ev, q, c1),
                                   kernel::eval_point<double>(ev, q, c0), d.phys(), dt);
  CompositeValues out;
  out.rho_new = k.rho1;
  out.rho_old = k.rho0;
  out.rho_half = k.rho_half;
  out.sqrt_rho_half = k.sqrt_half;
  out.div_w = k.div_w;
  out.c_half = k.c_half;
  out.mu_half = k.mu_half;
  out.p_tilde = k.p;
  out.c_t = k.c_t;
  for (int i = 0; i < 2; ++i) {
    out.w[i] = k.w[i];
    out.w_t[i] = k.w_t[i];
    out.grad_w[i][0] = k.gw[i][0];
    out.grad_w[i][1] = k.gw[i][1];
    out.grad_c_half[i] = k.gc_half[i];
    out.grad_mu_half[i] = k.gmu_half[i];
    out.grad_rho_half[i] = k.grad_rho_half[i];
  }
  return out;
}

void residual_and_jacobian(const Discretization& d, const State& prev, const State& cand,
                           double dt, Vector& r, SparseMatrix& j, Exec exec) {
  check_states(d, prev, cand, dt);
  const int n = d.num_dofs();
  const bool mid = d.options().midpoint_double_well;
  const PhysParams& ph = d.phys();
  auto kern = [&](const ElementValues& ev, LocalSystem& loc) {
    const auto c0 = kernel::gather(ev, prev.x, n);
    const auto c1v = kernel::gather(ev, cand.x, n);
    if (!loc.want_matrix) {
      std::array<double, kernel::kLocal> out;
      kernel::element_residual<double>(ev, ph, dt, mid, c1v, c0, out);
      std::copy(out.begin(), out.end(), loc.vec.begin());
      return;
    }
    std::array<Jet, kernel::kLocal> c1;
    for (int i = 0; i < kernel::kLocal; ++i) c1[i] = Jet(c1v[i], i);
    std::array<Jet, kernel::kLocal> out;
    kernel::element_residual<Jet>(ev, ph, dt, mid, c1, c0, out);
    for (int i = 0; i < kernel::kLocal; ++i) {
      if (loc.want_vector) loc.vec[i] = out[i].a;
      for (int k = 0; k < kernel::kLocal; ++k) loc.A(i, k) = out[i].v[k];
    }
  };
  assemble(d.pattern(), d.rule(), kern, &j, &r, exec);
}

Vector residual(const Discretization& d, const State& prev, const State& cand, double dt,
                Exec exec) {
  check_states(d, prev, cand, dt);
  const int n = d.num_dofs();
  const bool mid = d.options().midpoint_double_well;
  const PhysParams& ph = d.phys();
  Vector r;
  assemble(
      d.pattern(), d.rule(),
      [&](const ElementValues& ev, LocalSystem& loc) {
        const auto c0 = kernel::gather(ev, prev.x, n);
        const auto c1 = kernel::gather(ev, cand.x, n);
        std::array<double, kernel::kLocal> out;
        kernel::element_residual<double>(ev, ph, dt, mid, c1, c0, out);
        std::copy(out.begin(), out.end(), loc.vec.begin());
      },
      nullptr, &r, exec);
  return r;
}

SparseMatrix jacobian(const Discretization& d, const State& prev, const State& cand, double dt,
                      Exec exec) {
  check_states(d, prev, cand, dt);
  const int n = d.num_dofs();
  const bool mid = d.options().midpoint_double_well;
  const PhysParams& ph = d.phys();
  SparseMatrix j;
  assemble(
      d.pattern(), d.rule(),
      [&](const ElementValues& ev, LocalSystem& loc) {
        const auto c0 = kernel::gather(ev, prev.x, n);
        const auto c1v = kernel::gather(ev, cand.x, n);
        std::array<Jet, kernel::kLocal> c1, out;
        for (int i = 0; i < kernel::kLocal; ++i) c1[i] = Jet(c1v[i], i);
        kernel::element_residual<Jet>(ev, ph, dt, mid, c1, c0, out);
        for (int i = 0; i < kernel::kLocal; ++i) {
          for (int k = 0; k < kernel::kLocal; ++k) loc.A(i, k) = out[i].v[k];
        }
      },
      &j, nullptr, exec);
  return j;
}

Vector initial_chemical_potential(const Discretization& d, std::span<const double> c) {
  if (static_cast<int>(c.size()) != d.num_dofs()) {
    throw std::invalid_argument("initial_chemical_potential: field size");
  }
  // With c^{n+1} = c^n, u~ = 0 and p~ = 0 the chemical-potential equation
  // reads (rho mu, chi) = (rho f + r F + (C/2)|grad c|^2 r + (r/rho)(M rho0/Fr^2) y, chi)
  //                       + (C rho grad c, grad chi)  with r = d rho/dc.
  const PhysParams& ph = d.phys();
  SparseMatrix m;
  Vector b;
  assemble(
      d.scalar_pattern(), d.rule(),
      [&](const ElementValues& ev, LocalSystem& loc) {
        for (std::size_t q = 0; q < ev.jxw.size(); ++q) {
          const double c0 = c[ev.dofs[0]];
          double cv = 0, gx = 0, gy = 0;
          for (int a = 0; a < 6; ++a) {
            const double dc = c[ev.dofs[a]] - c0;
            cv += ev.phi[q][a] * dc;
            gx += ev.grad[q][a][0] * dc;
            gy += ev.grad[q][a][1] * dc;
          }
          cv += c0;
          const double rho = density(cv, ph);
          if (!(rho > 0.0)) {
            throw std::domain_error("initial_chemical_potential: c = " + std::to_string(cv) +
                                    " gives density " + std::to_string(rho) +
                                    "; the mesh does not resolve the interface");
          }
          const double r = drho_dc(cv, ph);
          const double src = rho * double_well_prime(cv) + r * double_well(cv) +
                             0.5 * ph.C() * (gx * gx + gy * gy) * r +
                             r / rho * ph.M() * ph.rho0() * ph.invFr2() * ev.x[q].y;
          const double jw = ev.jxw[q];
          for (int a = 0; a < 6; ++a) {
            loc.vec[a] += jw * (src * ev.phi[q][a] +
                                ph.C() * rho * (gx * ev.grad[q][a][0] + gy * ev.grad[q][a][1]));
            for (int bb = 0; bb < 6; ++bb) loc.A(a, bb) += jw * rho * ev.phi[q][a] * ev.phi[q][bb];
          }
        }
      },
      &m, &b, Exec::serial);
  return solve_sparse(m, b);
}

PhysicalFields recover_physical(const Discretization& d, const State& s, const State* prev) {
  const int n = d.num_dofs();
  if (s.num_dofs() != n || (prev && prev->num_dofs() != n)) {
    throw std::invalid_argument("recover_physical: state size");
  }
  PhysicalFields out;
  out.ux.resize(n);
  out.uy.resize(n);
  out.p_hat.resize(n);
  auto ux = s.field(kUx), uy = s.field(kUy), p = s.field(kP), c = s.field(kC);
  for (int i = 0; i < n; ++i) {
    const double rho = density(c[i], d.phys());
    const double sr = std::sqrt(rho);
    out.ux[i] = ux[i] / sr;
    out.uy[i] = uy[i] / sr;
    const double rho_half = prev ? 0.5 * (rho + density(prev->field(kC)[i], d.phys())) : rho;
    out.p_hat[i] = p[i] * rho_half;
  }
  return out;
}

}  // namespace nsch
