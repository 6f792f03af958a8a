#pragma once

// Time-discrete coupled system in the variables u~ = sqrt(rho) u and
// p~ = p^/rho: residual, exact Jacobian, Newton iteration and time stepping.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsch/fem.hpp"
#include "nsch/mesh.hpp"
#include "nsch/physics.hpp"

namespace nsch {

enum Field : int { kUx = 0, kUy = 1, kP = 2, kC = 3, kMu = 4 };
inline constexpr int kNumFields = 5;

struct SchemeOptions {
  int quadrature_degree = 6;
  // Test hook: use f(c^{n+1/2}) in place of the secant g. Breaks the energy law.
  bool midpoint_double_well = false;

  bool operator==(const SchemeOptions&) const = default;
};

/// Everything tied to one mesh: space, quadrature rule, block pattern,
/// constrained unknowns and the scalar H1 Gram matrix.
class Discretization {
 public:
  Discretization(std::shared_ptr<const P2Space> space, const PhysParams& phys,
                 SchemeOptions opts = {});

  const P2Space& space() const { return *space_; }
  std::shared_ptr<const P2Space> space_ptr() const { return space_; }
  const Mesh& mesh() const { return space_->mesh(); }
  const PhysParams& phys() const { return phys_; }
  const SchemeOptions& options() const { return opts_; }
  const QuadratureRule& rule() const { return *rule_; }
  std::shared_ptr<const QuadratureRule> rule_ptr() const { return rule_; }
  const AssemblyPattern& pattern() const { return pattern_; }
  const AssemblyPattern& scalar_pattern() const { return scalar_pattern_; }

  int num_dofs() const { return space_->num_dofs(); }
  int size() const { return kNumFields * num_dofs(); }
  int index(Field f, int dof) const { return f * num_dofs() + dof; }

  /// Velocity dofs on the wall, plus p~ dof 0. The continuity equation
  /// tested with q = 1 is void, which leaves a joint (p~, mu) level free.
  const std::vector<int>& constrained() const { return constrained_; }
  /// Mass + stiffness on the scalar space.
  const SparseMatrix& h1_gram() const { return h1_; }
  /// Mass matrix on the scalar space.
  const SparseMatrix& mass() const { return mass_; }

 private:
  std::shared_ptr<const P2Space> space_;
  PhysParams phys_;
  SchemeOptions opts_;
  std::shared_ptr<const QuadratureRule> rule_;
  AssemblyPattern pattern_;
  AssemblyPattern scalar_pattern_;
  std::vector<int> constrained_;
  SparseMatrix mass_;
  SparseMatrix h1_;
};

/// Coefficients of (u~x, u~y, p~, c, mu), field-major. p~ belongs to the
/// half level before t.
struct State {
  double t = 0.0;
  Vector x;

  static State zeros(int num_dofs, double t = 0.0);
  int num_dofs() const { return static_cast<int>(x.size()) / kNumFields; }
  std::span<double> field(Field f) {
    const std::size_t n = x.size() / kNumFields;
    return {x.data() + f * n, n};
  }
  std::span<const double> field(Field f) const {
    const std::size_t n = x.size() / kNumFields;
    return {x.data() + f * n, n};
  }
};

/// Composite quantities of the scheme at one point.
struct CompositeValues {
  double rho_new, rho_old, rho_half, sqrt_rho_half;
  double w[2];          // (sqrt(rho) u)^{n+1}
  double grad_w[2][2];  // grad_w[k][d] = d w_k / dx_d
  double div_w;
  double w_t[2];        // (u~^{n+1} - u~^n) / dt
  double c_half, mu_half, p_tilde, c_t;
  double grad_c_half[2], grad_mu_half[2];
  double grad_rho_half[2];
};

/// Composite values at quadrature point q of element t.
CompositeValues composite_fields(const Discretization& d, const State& prev, const State& cand,
                                 double dt, int t, int q);

/// Weak residual of the step prev -> cand. Rows: momentum x, momentum y,
/// continuity, phase transport, chemical potential.
Vector residual(const Discretization& d, const State& prev, const State& cand, double dt,
                Exec exec = Exec::parallel);

/// Derivative of residual() with respect to cand.
SparseMatrix jacobian(const Discretization& d, const State& prev, const State& cand, double dt,
                      Exec exec = Exec::parallel);

/// Residual and Jacobian in one element sweep.
void residual_and_jacobian(const Discretization& d, const State& prev, const State& cand,
                           double dt, Vector& r, SparseMatrix& j, Exec exec = Exec::parallel);

/// Chemical potential consistent with c, zero velocity and zero p~ (the
/// chemical-potential equation with c^{n+1} = c^n).
Vector initial_chemical_potential(const Discretization& d, std::span<const double> c);

struct PhysicalFields {
  Vector ux, uy, p_hat;
};

/// Nodal u = u~ / sqrt(rho(c)) and p^ = p~ rho. With the previous state
/// given, rho for p^ is the half-level mean (rho(c^n) + rho(c^{n+1}))/2;
/// otherwise rho(c).
PhysicalFields recover_physical(const Discretization& d, const State& s,
                                const State* prev = nullptr);

// ---------------------------------------------------------------------------
// Newton and time stepping

struct NewtonConfig {
  double tol = 1e-5;
  int max_iters = 25;
  double divergence_factor = 1e8;  // residual growth that counts as divergence
  /// With alpha = 0 the equal-order pressure has modes that no velocity test
  /// function sees. delta * (p, q) is added to the pressure block of the
  /// Newton matrix (not the residual) so the linear solve stays regular.
  double pressure_regularization = 1e-8;

  void validate() const;
  bool operator==(const NewtonConfig&) const = default;
};

struct TimeConfig {
  double dt = 0.01;
  double t_end = 1.0;
  int adapt_interval = 0;  // steps between remeshes; 0 disables
  int max_halvings = 3;

  void validate() const;
  bool operator==(const TimeConfig&) const = default;
};

struct StepReport {
  int newton_iters = 0;
  double increment = 0.0;
  int linear_solves = 0;
  bool remeshed = false;
  int halvings = 0;
  std::vector<double> increments;  // per iteration, all sub-steps in order
  std::vector<double> residuals;   // residual max-norm before each iteration
};

class NewtonError : public std::runtime_error {
 public:
  enum class Kind { max_iters, singular, diverged, density_floor };
  NewtonError(Kind kind, const std::string& what, StepReport report)
      : std::runtime_error(what), kind_(kind), report_(std::move(report)) {}
  Kind kind() const { return kind_; }
  const StepReport& report() const { return report_; }

 private:
  Kind kind_;
  StepReport report_;
};

/// Combined H1 norm of an increment: sqrt of the summed squared H1 norms of
/// u~ (both components), p~, c and mu.
double increment_norm(const Discretization& d, std::span<const double> delta);

/// Full Newton steps on the reduced system until increment_norm < cfg.tol, or
/// until the residual is at roundoff (1e-12 of its first value, or stalled
/// below 1e-9 of it).
State newton_solve(const Discretization& d, const State& prev, const State& guess, double dt,
                   const NewtonConfig& cfg, StepReport& report);

/// One time step with the previous state as initial guess; on failure the
/// step is retried as 2, 4, ... sub-steps up to TimeConfig::max_halvings.
State advance(const Discretization& d, const State& prev, double dt, const NewtonConfig& cfg,
              StepReport& report, int max_halvings = 3);

struct StepEvent {
  int step = 0;
  std::shared_ptr<const Discretization> disc;  // mesh of prev and state
  const State* prev = nullptr;
  const State* state = nullptr;
  const StepReport* report = nullptr;
  // Set after a remesh following this step.
  std::shared_ptr<const Discretization> new_disc;
  const State* transferred = nullptr;
};

using StepObserver = std::function<void(const StepEvent&)>;

struct RunResult {
  std::shared_ptr<const Discretization> disc;
  State state;
  int steps = 0;
  int remeshes = 0;
  bool ok = true;
  std::string error;
};

/// Step from `initial` for `steps` steps (or until t_end when steps < 0).
/// Every adapt_interval steps the mesh is adapted to c and all fields are
/// interpolated onto it. A failed step stops the run; the last good state is
/// returned with ok = false.
RunResult run(std::shared_ptr<const Discretization> disc, State initial, const TimeConfig& time,
              const NewtonConfig& newton, const AdaptOptions& adapt_opts, int steps,
              const StepObserver& observer = {});

}  // namespace nsch
