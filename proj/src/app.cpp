#include "nsch/app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace nsch {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Presets

namespace {

RunConfig kissing(double rho2) {
  RunConfig c;
  c.ic = InitialCondition::kissing;
  const double eps = 0.01;
  c.phys.eps = eps;
  c.phys.rho1 = 1.0;
  c.phys.rho2 = rho2;
  c.phys.rho0 = rho2;
  c.phys.Re = 1.0;
  c.phys.C = 100.0 * eps * eps;
  c.phys.M = 1.0 / (10.0 * eps);
  c.phys.Pe = 100.0 / eps;
  c.phys.invFr2 = 0.0;
  c.time.dt = 0.01;
  c.time.t_end = 1.0;
  c.adaptive = true;
  return c;
}

RunConfig rising(double rho2, double dt) {
  RunConfig c;
  c.ic = InitialCondition::rising;
  const double eps = 0.01;
  c.phys.eps = eps;
  c.phys.rho1 = 1.0;
  c.phys.rho2 = rho2;
  c.phys.rho0 = rho2;
  c.phys.Re = 1.0;
  c.phys.C = 200.0 * eps * eps;
  c.phys.M = 1.0 / (20.0 * eps);
  c.phys.Pe = 1000.0 / eps;
  c.phys.invFr2 = 10.0;
  c.time.dt = dt;
  c.time.t_end = 1.9;
  c.adaptive = true;
  return c;
}

const std::map<std::string, std::function<RunConfig()>>& preset_table() {
  static const std::map<std::string, std::function<RunConfig()>> table{
      {"kissing-matched", [] { return kissing(1.0); }},
      {"kissing-1to10", [] { return kissing(10.0); }},
      {"rising-1to2", [] { return rising(2.0, 0.001); }},
      {"rising-1to50", [] { return rising(50.0, 0.00025); }},
  };
  return table;
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : preset_table()) v.push_back(k);
    return v;
  }();
  return names;
}

RunConfig preset(const std::string& name) {
  auto it = preset_table().find(name);
  if (it == preset_table().end()) throw std::invalid_argument("unknown preset '" + name + "'");
  RunConfig c = it->second();
  c.preset = name;
  c.out_dir = "out/" + name;
  return c;
}

void RunConfig::validate() const {
  PhysParams p(phys);
  time.validate();
  newton.validate();
  adapt.validate();
  if (nx < 1 || ny < 1) throw std::invalid_argument("RunConfig: mesh.nx and mesh.ny must be >= 1");
  if (snapshot_interval < 0) throw std::invalid_argument("RunConfig: snapshot_interval < 0");
  if (initial_adapt_rounds < 0) throw std::invalid_argument("RunConfig: initial rounds < 0");
  (void)quadrature(scheme.quadrature_degree);
}

// ---------------------------------------------------------------------------
// Config text

namespace {

struct Key {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
  bool locked_by_preset = false;
};

double to_double(const std::string& v) {
  double x;
  const char* end = v.data() + v.size();
  auto res = std::from_chars(v.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument("not a number: " + v);
  return x;
}

long long to_int(const std::string& v) {
  long long x;
  const char* end = v.data() + v.size();
  auto res = std::from_chars(v.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument("not an integer: " + v);
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("not a boolean: " + v);
}

#define NSCH_DOUBLE(name, member, locked)                                          \
  {name,                                                                           \
   {[](const RunConfig& c) { return fmt(c.member); },                              \
    [](RunConfig& c, const std::string& v) { c.member = to_double(v); }, locked}}
#define NSCH_INT(name, member)                                                     \
  {name,                                                                           \
   {[](const RunConfig& c) { return std::to_string(c.member); },                   \
    [](RunConfig& c, const std::string& v) { c.member = static_cast<int>(to_int(v)); }}}
#define NSCH_BOOL(name, member)                                                    \
  {name,                                                                           \
   {[](const RunConfig& c) { return std::string(c.member ? "true" : "false"); },   \
    [](RunConfig& c, const std::string& v) { c.member = to_bool(v); }}}

const std::vector<std::pair<std::string, Key>>& keys() {
  static const std::vector<std::pair<std::string, Key>> k{
      {"ic",
       {[](const RunConfig& c) {
          return std::string(c.ic == InitialCondition::kissing ? "kissing" : "rising");
        },
        [](RunConfig& c, const std::string& v) {
          if (v == "kissing") {
            c.ic = InitialCondition::kissing;
          } else if (v == "rising") {
            c.ic = InitialCondition::rising;
          } else {
            throw std::invalid_argument("ic must be kissing or rising");
          }
        },
        true}},
      NSCH_DOUBLE("phys.rho1", phys.rho1, true),
      NSCH_DOUBLE("phys.rho2", phys.rho2, true),
      NSCH_DOUBLE("phys.rho0", phys.rho0, false),
      NSCH_DOUBLE("phys.Re", phys.Re, false),
      NSCH_DOUBLE("phys.Pe", phys.Pe, true),
      NSCH_DOUBLE("phys.M", phys.M, true),
      NSCH_DOUBLE("phys.C", phys.C, true),
      NSCH_DOUBLE("phys.invFr2", phys.invFr2, true),
      NSCH_DOUBLE("phys.eps", phys.eps, true),
      NSCH_DOUBLE("time.dt", time.dt, true),
      NSCH_DOUBLE("time.t_end", time.t_end, false),
      NSCH_INT("time.steps", steps),
      NSCH_INT("time.max_halvings", time.max_halvings),
      NSCH_DOUBLE("newton.tol", newton.tol, false),
      NSCH_INT("newton.max_iters", newton.max_iters),
      NSCH_DOUBLE("newton.divergence_factor", newton.divergence_factor, false),
      NSCH_DOUBLE("newton.pressure_regularization", newton.pressure_regularization, false),
      NSCH_INT("mesh.nx", nx),
      NSCH_INT("mesh.ny", ny),
      NSCH_BOOL("mesh.adaptive", adaptive),
      NSCH_INT("adapt.interval", adapt.interval),
      NSCH_DOUBLE("adapt.threshold", adapt.threshold, false),
      NSCH_DOUBLE("adapt.coarsen_threshold", adapt.coarsen_threshold, false),
      NSCH_BOOL("adapt.relative", adapt.relative),
      NSCH_DOUBLE("adapt.h_min", adapt.h_min, false),
      NSCH_INT("adapt.max_depth", adapt.max_depth),
      NSCH_INT("adapt.initial_rounds", initial_adapt_rounds),
      NSCH_INT("scheme.quadrature_degree", scheme.quadrature_degree),
      NSCH_INT("output.snapshot_interval", snapshot_interval),
      {"output.dir",
       {[](const RunConfig& c) { return c.out_dir; },
        [](RunConfig& c, const std::string& v) { c.out_dir = v; }}},
      {"seed",
       {[](const RunConfig& c) { return std::to_string(c.seed); },
        [](RunConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(to_int(v)); }}},
  };
  return k;
}

#undef NSCH_DOUBLE
#undef NSCH_INT
#undef NSCH_BOOL

}  // namespace

RunConfig parse_config(const std::string& text) {
  struct Line {
    int no;
    std::string key, value;
  };
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  for (int no = 1; std::getline(in, raw); ++no) {
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(no, "line " + std::to_string(no) + ": expected 'key = value'");
    }
    std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(no, "line " + std::to_string(no) + ": empty key or value");
    }
    lines.push_back({no, key, value});
  }

  RunConfig cfg;
  RunConfig reference;
  bool from_preset = false;
  bool rho0_set = false;
  for (const auto& l : lines) {
    if (l.key != "preset") continue;
    if (l.value != "custom") {
      try {
        cfg = preset(l.value);
      } catch (const std::exception& e) {
        throw ConfigError(l.no, "line " + std::to_string(l.no) + ": " + e.what());
      }
      reference = cfg;
      from_preset = true;
    }
  }
  for (const auto& l : lines) {
    if (l.key == "preset") continue;
    auto it = std::find_if(keys().begin(), keys().end(),
                           [&](const auto& kv) { return kv.first == l.key; });
    if (it == keys().end()) {
      throw ConfigError(l.no, "line " + std::to_string(l.no) + ": unknown key '" + l.key + "'");
    }
    try {
      it->second.set(cfg, l.value);
    } catch (const std::exception& e) {
      throw ConfigError(l.no, "line " + std::to_string(l.no) + ": " + l.key + ": " + e.what());
    }
    if (from_preset && it->second.locked_by_preset &&
        it->second.get(cfg) != it->second.get(reference)) {
      throw ConfigError(l.no, "line " + std::to_string(l.no) + ": " + l.key +
                                  " is fixed by preset '" + reference.preset + "' (" +
                                  it->second.get(reference) + "); use preset = custom");
    }
    if (l.key == "phys.rho0") rho0_set = true;
  }
  if (!from_preset && !rho0_set) cfg.phys.rho0 = cfg.phys.rho2;
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(0, std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "preset = " << cfg.preset << "\n";
  for (const auto& [name, key] : keys()) os << name << " = " << key.get(cfg) << "\n";
  return os.str();
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& line : provenance(cfg)) out << "#" << line << "\n";
  out << format_config(cfg);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> provenance(const RunConfig& cfg) {
  std::vector<std::string> v;
  v.push_back(" nsch " + std::string(kVersion));
  v.push_back(" preset " + cfg.preset);
  v.push_back(" Re = " + fmt(cfg.phys.Re) + " and rho0 = " + fmt(cfg.phys.rho0) +
              " are free defaults (the reference setup leaves them unspecified)");
  std::istringstream in(format_config(cfg));
  std::string line;
  while (std::getline(in, line)) v.push_back(" " + line);
  return v;
}

// ---------------------------------------------------------------------------
// Initial conditions

double ic_value(InitialCondition ic, const PhysParams& p, Point x) {
  const double w = 2.0 * std::sqrt(2.0) * p.eps();
  if (ic == InitialCondition::kissing) {
    const double r = 0.2 * std::sqrt(2.0);
    const double s = r / std::sqrt(2.0);
    const double da = std::hypot(x.x + s, x.y - s);
    const double db = std::hypot(x.x - s, x.y + s);
    return 0.5 * std::tanh((da - r) / w) + 0.5 * std::tanh((db - r) / w);
  }
  const double r = 0.2;
  const double d = std::hypot(x.x, x.y + 0.6);
  return 0.5 * std::tanh((r - d) / w) + 0.5;
}

namespace {
Vector interpolate(const P2Space& space, InitialCondition ic, const PhysParams& p) {
  Vector c(space.num_dofs());
  for (int i = 0; i < space.num_dofs(); ++i) c[i] = ic_value(ic, p, space.dof_coords()[i]);
  return c;
}
}  // namespace

Vector ic_kissing(const P2Space& space, const PhysParams& p) {
  return interpolate(space, InitialCondition::kissing, p);
}

Vector ic_rising(const P2Space& space, const PhysParams& p) {
  return interpolate(space, InitialCondition::rising, p);
}

Setup initial_setup(const RunConfig& cfg) {
  cfg.validate();
  PhysParams phys(cfg.phys);
  auto mesh = std::make_shared<const Mesh>(build_rect_mesh(cfg.nx, cfg.ny));
  if (cfg.adaptive) {
    for (int round = 0; round < cfg.initial_adapt_rounds; ++round) {
      auto space = build_p2_space(mesh);
      Vector c = interpolate(*space, cfg.ic, phys);
      Mesh next = adapt(*space, c, cfg.adapt);
      if (next.same_triangulation(*mesh)) break;
      mesh = std::make_shared<const Mesh>(std::move(next));
    }
  }
  Setup s;
  s.disc = std::make_shared<const Discretization>(build_p2_space(mesh), phys, cfg.scheme);
  s.state = State::zeros(s.disc->num_dofs());
  Vector c = interpolate(s.disc->space(), cfg.ic, phys);
  std::copy(c.begin(), c.end(), s.state.field(kC).begin());
  Vector mu = initial_chemical_potential(*s.disc, c);
  std::copy(mu.begin(), mu.end(), s.state.field(kMu).begin());
  return s;
}

// ---------------------------------------------------------------------------
// Output

TimeseriesWriter::TimeseriesWriter(const std::string& path,
                                   const std::vector<std::string>& comments)
    : path_(path), out_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& c : comments) out_ << "#" << c << "\n";
  out_ << kTimeseriesHeader << "\n";
  out_.flush();
}

void TimeseriesWriter::write_row(double t, const EnergyBreakdown& e, const LawReport* law,
                                 double vol, double m, int newton_iters, bool remeshed) {
  const LawReport zero;
  const LawReport& l = law ? *law : zero;
  out_ << fmt17(t) << ',' << fmt17(e.total) << ',' << fmt17(e.kinetic) << ',' << fmt17(e.mixing)
       << ',' << fmt17(e.gradient) << ',' << fmt17(e.potential) << ',' << fmt17(l.viscous) << ','
       << fmt17(l.divergence) << ',' << fmt17(l.chemical) << ',' << fmt17(l.residual) << ','
       << fmt17(vol) << ',' << fmt17(m) << ',' << newton_iters << ',' << (remeshed ? 1 : 0)
       << "\n";
  out_.flush();
  if (!out_) throw std::runtime_error("write failed: " + path_);
  ++rows_;
}

void write_snapshot(const std::string& path, const Discretization& d, const State& s,
                    const Vector& div_u, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const P2Space& sp = d.space();
  const int n = sp.num_dofs();
  const int ne = sp.num_elements();
  PhysicalFields phys = recover_physical(d, s);
  out << "# vtk DataFile Version 3.0\n";
  std::string t = title;
  std::replace(t.begin(), t.end(), '\n', ' ');
  out << t.substr(0, 255) << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  out << std::setprecision(17);
  for (const auto& p : sp.dof_coords()) out << p.x << ' ' << p.y << " 0\n";
  out << "CELLS " << ne << ' ' << 7 * ne << "\n";
  for (int e = 0; e < ne; ++e) {
    auto dofs = sp.element_dofs(e);
    // VTK order: corners, then midpoints of edges (0,1), (1,2), (2,0)
    out << "6 " << dofs[0] << ' ' << dofs[1] << ' ' << dofs[2] << ' ' << dofs[5] << ' '
        << dofs[3] << ' ' << dofs[4] << "\n";
  }
  out << "CELL_TYPES " << ne << "\n";
  for (int e = 0; e < ne; ++e) out << "22\n";
  out << "POINT_DATA " << n << "\n";
  auto scalars = [&](const char* name, std::span<const double> v) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double x : v) out << x << "\n";
  };
  scalars("c", s.field(kC));
  scalars("mu", s.field(kMu));
  scalars("p_hat", phys.p_hat);
  scalars("div_u", div_u);
  out << "VECTORS u double\n";
  for (int i = 0; i < n; ++i) out << phys.ux[i] << ' ' << phys.uy[i] << " 0\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06d.vtk", step);
  return buf;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg_in, const StepObserver& extra) {
  RunConfig cfg = cfg_in;
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  save_config(cfg, (fs::path(cfg.out_dir) / "run_config.txt").string());
  Setup setup = initial_setup(cfg);
  const auto prov = provenance(cfg);
  TimeseriesWriter ts((fs::path(cfg.out_dir) / "timeseries.csv").string(), prov);
  std::ofstream remesh_log;
  if (cfg.adaptive) {
    remesh_log.open(fs::path(cfg.out_dir) / "remesh.csv");
    for (const auto& c : prov) remesh_log << "#" << c << "\n";
    remesh_log << "step,t,E_before,E_after,volume_before,volume_after,triangles_before,"
                  "triangles_after\n";
  }
  ExperimentResult res;
  int last_snapshot = -1;
  auto snapshot = [&](int step, const Discretization& d, const State& s) {
    const std::string title = "nsch " + std::string(kVersion) + " preset=" + cfg.preset +
                              " step=" + std::to_string(step) + " t=" + fmt17(s.t);
    write_snapshot((fs::path(cfg.out_dir) / snapshot_name(step)).string(), d, s,
                   divergence_field(d, s), title);
    ++res.snapshots;
    last_snapshot = step;
  };

  {
    const Discretization& d = *setup.disc;
    ts.write_row(setup.state.t, energy(d, setup.state), nullptr, volume(d, setup.state),
                 mass(d, setup.state), 0, false);
    snapshot(0, d, setup.state);
  }

  TimeConfig time = cfg.time;
  time.adapt_interval = cfg.adapt_interval();
  const int steps = cfg.steps;
  auto observer = [&](const StepEvent& ev) {
    const Discretization& d = *ev.disc;
    const LawReport law = law_report(d, *ev.prev, *ev.state, ev.state->t - ev.prev->t);
    const EnergyBreakdown e = energy(d, *ev.state);
    ts.write_row(ev.state->t, e, &law, volume(d, *ev.state), mass(d, *ev.state),
                 ev.report->newton_iters, ev.report->remeshed);
    if (cfg.snapshot_interval > 0 && ev.step % cfg.snapshot_interval == 0) {
      snapshot(ev.step, d, *ev.state);
    }
    if (ev.new_disc && remesh_log.is_open()) {
      const EnergyBreakdown e2 = energy(*ev.new_disc, *ev.transferred);
      remesh_log << ev.step << ',' << fmt17(ev.state->t) << ',' << fmt17(e.total) << ','
                 << fmt17(e2.total) << ',' << fmt17(volume(d, *ev.state)) << ','
                 << fmt17(volume(*ev.new_disc, *ev.transferred)) << ','
                 << d.mesh().num_triangles() << ',' << ev.new_disc->mesh().num_triangles()
                 << "\n";
      remesh_log.flush();
    }
    if (extra) extra(ev);
  };
  res.run = run(setup.disc, std::move(setup.state), time, cfg.newton, cfg.adapt, steps, observer);
  if (res.run.steps != last_snapshot) snapshot(res.run.steps, *res.run.disc, res.run.state);
  res.rows = ts.rows();
  return res;
}

// ---------------------------------------------------------------------------
// Verification helpers

std::pair<State, State> perturbed_pair(const Discretization& d, const State& base,
                                       double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  State cand = base;
  for (double& v : cand.x) v += amplitude * u(rng);
  for (int i : d.constrained()) {
    if (i < kP * d.num_dofs()) cand.x[i] = 0.0;
  }
  cand.t = base.t + 1.0;
  return {base, cand};
}

JacobianCheck check_jacobian(const Discretization& d, const State& prev, const State& cand,
                             double dt, int directions, double eps, std::uint64_t seed) {
  const SparseMatrix j = jacobian(d, prev, cand, dt, Exec::serial);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  JacobianCheck out;
  for (int k = 0; k < directions; ++k) {
    Vector w(d.size());
    for (double& v : w) v = u(rng);
    const Vector jw = j * w;
    State plus = cand, minus = cand;
    for (std::size_t i = 0; i < w.size(); ++i) {
      plus.x[i] += eps * w[i];
      minus.x[i] -= eps * w[i];
    }
    const Vector rp = residual(d, prev, plus, dt, Exec::serial);
    const Vector rm = residual(d, prev, minus, dt, Exec::serial);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < jw.size(); ++i) {
      const double fd = (rp[i] - rm[i]) / (2.0 * eps);
      num += (jw[i] - fd) * (jw[i] - fd);
      den += jw[i] * jw[i];
    }
    double err = std::sqrt(num / den);
    if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    out.errors.push_back(err);
    out.max_error = std::max(out.max_error, err);
  }
  return out;
}

std::vector<EnergyLawLevel> energy_law_sweep(const RunConfig& cfg_in, int base_n, int levels,
                                             double newton_tol, bool adaptive) {
  if (base_n < 1 || levels < 1) throw std::invalid_argument("energy_law_sweep: bad levels");
  std::vector<EnergyLawLevel> out;
  for (int k = 0; k < levels; ++k) {
    RunConfig cfg = cfg_in;
    cfg.adaptive = adaptive;
    cfg.nx = cfg.ny = adaptive ? base_n : base_n << k;
    if (adaptive) cfg.adapt.h_min = 1.0 / double(base_n << k);
    cfg.newton.tol = newton_tol;
    Setup s = initial_setup(cfg);
    StepReport rep;
    State next = newton_solve(*s.disc, s.state, s.state, cfg.time.dt, cfg.newton, rep);
    LawReport law = law_report(*s.disc, s.state, next, cfg.time.dt);
    EnergyLawLevel l;
    l.n = cfg.nx;
    l.h_min = adaptive ? cfg.adapt.h_min : 0.0;
    l.triangles = s.disc->mesh().num_triangles();
    l.law_residual = law.residual;
    l.dissipation = law.dissipation();
    l.ratio = law.residual / law.dissipation();
    l.newton_iters = rep.newton_iters;
    out.push_back(l);
  }
  return out;
}

double sigma_tanh_profile(const PhysParams& p, int samples, double half_width_eps) {
  const double L = half_width_eps * p.eps();
  const double w = 2.0 * std::sqrt(2.0) * p.eps();
  std::vector<double> z(samples), c(samples);
  for (int i = 0; i < samples; ++i) {
    z[i] = -L + 2.0 * L * i / (samples - 1);
    c[i] = 0.5 * (1.0 + std::tanh(z[i] / w));
  }
  return surface_tension_1d(p, z, c);
}

}  // namespace nsch
