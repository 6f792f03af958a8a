#pragma once

// Configuration, initial conditions, experiment presets and output files.

#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsch/diagnostics.hpp"
#include "nsch/mesh.hpp"
#include "nsch/physics.hpp"
#include "nsch/scheme.hpp"

namespace nsch {

inline constexpr const char* kVersion = "0.1.0";

enum class InitialCondition { kissing, rising };

struct RunConfig {
  std::string preset = "custom";
  InitialCondition ic = InitialCondition::kissing;
  PhysConstants phys;
  TimeConfig time;
  NewtonConfig newton;
  AdaptOptions adapt;
  SchemeOptions scheme;
  int nx = 32, ny = 32;
  bool adaptive = false;      // mesh adaptation on/off; interval from adapt.interval
  int initial_adapt_rounds = 8;
  int steps = -1;             // < 0: run to time.t_end
  int snapshot_interval = 10; // 0: only first and last snapshot
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  bool operator==(const RunConfig&) const = default;
  void validate() const;
  /// Steps between remeshes actually used by the run (0 when not adaptive).
  int adapt_interval() const { return adaptive ? adapt.interval : 0; }
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Names accepted by preset().
const std::vector<std::string>& preset_names();
/// Throws std::invalid_argument for an unknown name.
RunConfig preset(const std::string& name);

/// Parse `key = value` lines (# comments). Keys are dotted (phys.rho1,
/// time.dt, newton.tol, ...). When `preset` names a known preset, the file
/// starts from it and the preset's model constants may not be changed.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string format_config(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

/// Nodal interpolation of the two-drop profile
/// c = 1/2 tanh((d_a - r)/(2 sqrt2 eps)) + 1/2 tanh((d_b - r)/(2 sqrt2 eps)).
Vector ic_kissing(const P2Space& space, const PhysParams& p);
/// Nodal interpolation of c = 1/2 tanh((r - d)/(2 sqrt2 eps)) + 1/2, r = 0.2,
/// centre (0, -0.6).
Vector ic_rising(const P2Space& space, const PhysParams& p);
double ic_value(InitialCondition ic, const PhysParams& p, Point x);

struct Setup {
  std::shared_ptr<const Discretization> disc;
  State state;
};

/// Base mesh, optional initial adaptation to the initial profile, and the
/// initial state (u~ = 0, p~ = 0, c from the profile, mu consistent with c).
Setup initial_setup(const RunConfig& cfg);

/// Comment lines (without the leading '#') describing the run.
std::vector<std::string> provenance(const RunConfig& cfg);

inline constexpr const char* kTimeseriesHeader =
    "t,E_total,E_kin,E_mix,E_grad,E_pot,D_visc,D_div,D_chem,law_residual,volume,mass,"
    "newton_iters,remeshed";

class TimeseriesWriter {
 public:
  TimeseriesWriter(const std::string& path, const std::vector<std::string>& comments);
  /// law may be null (initial row): dissipation and residual are written as 0.
  void write_row(double t, const EnergyBreakdown& e, const LawReport* law, double volume,
                 double mass, int newton_iters, bool remeshed);
  int rows() const { return rows_; }

 private:
  std::string path_;
  std::ofstream out_;
  int rows_ = 0;
};

/// VTK legacy ASCII unstructured grid with 6-node quadratic triangles.
void write_snapshot(const std::string& path, const Discretization& d, const State& s,
                    const Vector& div_u, const std::string& title);

struct ExperimentResult {
  RunResult run;
  int rows = 0;
  int snapshots = 0;
};

/// Run a configuration and write run_config.txt, timeseries.csv, remesh.csv
/// (when adaptive) and snapshots into cfg.out_dir. `extra` sees every step.
ExperimentResult run_experiment(const RunConfig& cfg, const StepObserver& extra = {});

// ---------------------------------------------------------------------------
// Verification helpers shared by the CLI and the tests

struct JacobianCheck {
  std::vector<double> errors;  // relative error per direction
  double max_error = 0.0;
};

/// Compare J w with central differences of the residual for random
/// directions w.
JacobianCheck check_jacobian(const Discretization& d, const State& prev, const State& cand,
                             double dt, int directions, double eps, std::uint64_t seed);

/// Kissing-drop state for derivative checks: the initial state as prev and a
/// randomly perturbed copy (wall velocities kept zero) as candidate.
std::pair<State, State> perturbed_pair(const Discretization& d, const State& base,
                                       double amplitude, std::uint64_t seed);

struct EnergyLawLevel {
  int n = 0;             // base mesh is n x n
  double h_min = 0.0;    // adaptive levels: target edge length at the interface
  int triangles = 0;
  double law_residual = 0.0;
  double dissipation = 0.0;
  double ratio = 0.0;
  int newton_iters = 0;
};

/// One step per level. Adaptive (default): base_n x base_n base mesh adapted
/// to the initial profile with h_min = 1 / (base_n 2^k). Uniform: n x n mesh
/// with n = base_n 2^k.
std::vector<EnergyLawLevel> energy_law_sweep(const RunConfig& cfg, int base_n, int levels,
                                             double newton_tol, bool adaptive = true);

/// Surface tension of the equilibrium tanh profile across one interface.
double sigma_tanh_profile(const PhysParams& p, int samples = 6001, double half_width_eps = 30.0);

int cli_main(int argc, char** argv);

}  // namespace nsch
