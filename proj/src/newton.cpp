#include <cmath>
#include <limits>
#include <sstream>

#include "nsch/scheme.hpp"

namespace nsch {

void NewtonConfig::validate() const {
  if (!(tol > 0)) throw std::invalid_argument("NewtonConfig: tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("NewtonConfig: max_iters must be >= 1");
  if (!(pressure_regularization >= 0)) {
    throw std::invalid_argument("NewtonConfig: pressure_regularization must be >= 0");
  }
  if (!(divergence_factor > 1)) {
    throw std::invalid_argument("NewtonConfig: divergence_factor must exceed 1");
  }
}

void TimeConfig::validate() const {
  if (!(dt > 0)) throw std::invalid_argument("TimeConfig: dt must be positive");
  if (adapt_interval < 0) throw std::invalid_argument("TimeConfig: adapt_interval must be >= 0");
  if (max_halvings < 0) throw std::invalid_argument("TimeConfig: max_halvings must be >= 0");
}

double increment_norm(const Discretization& d, std::span<const double> delta) {
  const int n = d.num_dofs();
  const SparseMatrix& h = d.h1_gram();
  Vector hd(n);
  double sum = 0.0;
  for (int f = 0; f < kNumFields; ++f) {
    auto part = delta.subspan(std::size_t(f) * n, n);
    h.multiply(part, hd);
    for (int i = 0; i < n; ++i) sum += part[i] * hd[i];
  }
  return std::sqrt(std::max(sum, 0.0));
}

namespace {

double max_free(const Vector& r, const std::vector<int>& constrained) {
  double m = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (k < constrained.size() && constrained[k] == static_cast<int>(i)) {
      ++k;
      continue;
    }
    if (!std::isfinite(r[i])) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(r[i]));
  }
  return m;
}

// Add delta * M to the (p, p) block. The block row of scalar dof i lists the
// scalar neighbours of i once per field, in the scalar row's order.
void regularize_pressure(const Discretization& d, double delta, SparseMatrix& j) {
  const SparseMatrix& m = d.mass();
  const int n = d.num_dofs();
  for (int i = 0; i < n; ++i) {
    const int s0 = m.row_ptr()[i];
    const int deg = m.row_ptr()[i + 1] - s0;
    const int b0 = j.row_ptr()[kP * n + i] + kP * deg;
    for (int k = 0; k < deg; ++k) j.values()[b0 + k] += delta * m.values()[s0 + k];
  }
}

}  // namespace

State newton_solve(const Discretization& d, const State& prev, const State& guess, double dt,
                   const NewtonConfig& cfg, StepReport& report) {
  cfg.validate();
  using Kind = NewtonError::Kind;
  State x = guess;
  x.t = prev.t + dt;
  const auto& fixed = d.constrained();
  const Vector zeros(fixed.size(), 0.0);
  SparseLU lu;
  SparseMatrix j;
  Vector r;
  double r_first = 0.0, r_prev = 0.0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    try {
      residual_and_jacobian(d, prev, x, dt, r, j);
    } catch (const DensityFloorError& e) {
      throw NewtonError(Kind::density_floor, e.what(), report);
    }
    const double rn = max_free(r, fixed);
    report.residuals.push_back(rn);
    if (it == 1) r_first = rn;
    if (!std::isfinite(rn) || (it > 1 && rn > cfg.divergence_factor * std::max(r_first, 1e-300))) {
      std::ostringstream os;
      os << "newton: residual grew to " << rn << " (first " << r_first << ") at iteration " << it;
      throw NewtonError(Kind::diverged, os.str(), report);
    }
    // Residual at roundoff: further steps only move the p~ modes the residual
    // cannot see (alpha = 0), by roundoff / pressure_regularization.
    if (it > 1 && (rn <= 1e-12 * r_first || (rn <= 1e-9 * r_first && rn >= 0.5 * r_prev))) {
      return x;
    }
    r_prev = rn;
    for (double& v : r) v = -v;
    if (d.phys().alpha() == 0.0 && cfg.pressure_regularization > 0) {
      regularize_pressure(d, cfg.pressure_regularization, j);
    }
    ReducedSystem red = apply_dirichlet(j, r, fixed, zeros);
    try {
      lu.factor(red.matrix);
    } catch (const SingularMatrixError& e) {
      const int full = e.pivot() >= 0 ? red.free_dofs[e.pivot()] : -1;
      std::ostringstream os;
      os << "newton: singular Jacobian at unknown " << full;
      if (full >= 0) os << " (field " << full / d.num_dofs() << ", dof " << full % d.num_dofs() << ")";
      throw NewtonError(Kind::singular, os.str(), report);
    }
    Vector delta = red.expand(lu.solve(red.rhs));
    ++report.linear_solves;
    for (std::size_t i = 0; i < delta.size(); ++i) x.x[i] += delta[i];
    const double inc = increment_norm(d, delta);
    report.increments.push_back(inc);
    report.increment = inc;
    ++report.newton_iters;
    if (!std::isfinite(inc)) {
      throw NewtonError(Kind::diverged, "newton: non-finite increment", report);
    }
    if (inc < cfg.tol) return x;
  }
  std::ostringstream os;
  os << "newton: no convergence in " << cfg.max_iters << " iterations (last increment "
     << report.increment << ", tol " << cfg.tol << ")";
  throw NewtonError(Kind::max_iters, os.str(), report);
}

State advance(const Discretization& d, const State& prev, double dt, const NewtonConfig& cfg,
              StepReport& report, int max_halvings) {
  for (int h = 0;; ++h) {
    const int sub = 1 << h;
    const double sdt = dt / sub;
    StepReport attempt;
    attempt.halvings = h;
    try {
      State s = prev;
      for (int k = 0; k < sub; ++k) {
        StepReport one;
        s = newton_solve(d, s, s, sdt, cfg, one);
        attempt.newton_iters += one.newton_iters;
        attempt.linear_solves += one.linear_solves;
        attempt.increment = one.increment;
        attempt.increments.insert(attempt.increments.end(), one.increments.begin(),
                                  one.increments.end());
        attempt.residuals.insert(attempt.residuals.end(), one.residuals.begin(),
                                 one.residuals.end());
      }
      s.t = prev.t + dt;
      report = std::move(attempt);
      return s;
    } catch (const NewtonError& e) {
      if (h >= max_halvings) throw;
    }
  }
}

RunResult run(std::shared_ptr<const Discretization> disc, State initial, const TimeConfig& time,
              const NewtonConfig& newton, const AdaptOptions& adapt_opts, int steps,
              const StepObserver& observer) {
  time.validate();
  newton.validate();
  if (time.adapt_interval > 0) adapt_opts.validate();
  RunResult out;
  out.disc = std::move(disc);
  out.state = std::move(initial);
  const double t0 = out.state.t;
  for (int step = 1;; ++step) {
    if (steps >= 0 && step > steps) break;
    if (steps < 0 && out.state.t >= time.t_end - 1e-9 * time.dt) break;
    StepReport report;
    State next;
    try {
      next = advance(*out.disc, out.state, time.dt, newton, report, time.max_halvings);
      next.t = t0 + step * time.dt;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = "step " + std::to_string(step) + ": " + e.what();
      return out;
    }
    StepEvent ev;
    ev.step = step;
    ev.disc = out.disc;
    ev.prev = &out.state;
    ev.state = &next;
    ev.report = &report;
    State moved;
    if (time.adapt_interval > 0 && step % time.adapt_interval == 0) {
      try {
        auto mesh = std::make_shared<const Mesh>(adapt(out.disc->space(), next.field(kC), adapt_opts));
        auto space = build_p2_space(mesh);
        auto nd = std::make_shared<const Discretization>(space, out.disc->phys(),
                                                         out.disc->options());
        Transfer tr(out.disc->space(), *space);
        moved = State::zeros(space->num_dofs(), next.t);
        for (int f = 0; f < kNumFields; ++f) {
          auto v = tr.apply(next.field(static_cast<Field>(f)));
          std::copy(v.begin(), v.end(), moved.field(static_cast<Field>(f)).begin());
        }
        // interpolation leaves wall velocities at zero already; keep them exact
        for (int i : nd->constrained()) {
          if (i < kP * nd->num_dofs()) moved.x[i] = 0.0;
        }
        report.remeshed = true;
        ev.new_disc = nd;
        ev.transferred = &moved;
        ++out.remeshes;
      } catch (const std::exception& e) {
        if (observer) observer(ev);
        out.state = std::move(next);
        out.steps = step;
        out.ok = false;
        out.error = "remesh after step " + std::to_string(step) + ": " + e.what();
        return out;
      }
    }
    if (observer) observer(ev);
    out.steps = step;
    if (ev.new_disc) {
      out.disc = ev.new_disc;
      out.state = std::move(moved);
    } else {
      out.state = std::move(next);
    }
  }
  return out;
}

}  // namespace nsch
