#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "nsch/app.hpp"

namespace nsch {

namespace {

int cmd_run(const std::string& config, const std::string& preset_name, const std::string& out,
            int steps) {
  RunConfig cfg = config.empty() ? preset(preset_name) : load_config(config);
  if (!out.empty()) cfg.out_dir = out;
  if (steps >= 0) cfg.steps = steps;
  std::cout << "running " << cfg.preset << " -> " << cfg.out_dir << std::endl;
  ExperimentResult res = run_experiment(cfg, [](const StepEvent& ev) {
    std::printf("step %6d  t = %.6f  newton %2d  halvings %d%s\n", ev.step, ev.state->t,
                ev.report->newton_iters, ev.report->halvings, ev.report->remeshed ? "  remesh" : "");
    std::fflush(stdout);
  });
  std::cout << res.run.steps << " steps, " << res.run.remeshes << " remeshes, " << res.snapshots
            << " snapshots" << std::endl;
  if (!res.run.ok) {
    std::cerr << "run failed: " << res.run.error << std::endl;
    return 1;
  }
  return 0;
}

int cmd_jacobian(const std::string& preset_name, int n, int directions, double tol) {
  RunConfig cfg = preset(preset_name);
  cfg.adaptive = false;
  cfg.nx = cfg.ny = n;
  Setup s = initial_setup(cfg);
  auto [prev, cand] = perturbed_pair(*s.disc, s.state, 1e-2, cfg.seed);
  JacobianCheck chk = check_jacobian(*s.disc, prev, cand, cfg.time.dt, directions, 1e-6, cfg.seed);
  for (std::size_t k = 0; k < chk.errors.size(); ++k) {
    std::printf("direction %2zu  rel error %.3e\n", k, chk.errors[k]);
  }
  const bool ok = chk.max_error < tol;
  std::printf("%s: max rel error %.3e (tol %.1e)\n", ok ? "PASS" : "FAIL", chk.max_error, tol);
  return ok ? 0 : 1;
}

int cmd_energy_law(const std::string& preset_name, int base, int levels, double tol,
                   bool uniform) {
  RunConfig cfg = preset(preset_name);
  auto lv = energy_law_sweep(cfg, base, levels, 1e-8, !uniform);
  bool ok = !lv.empty();
  std::printf("%6s %10s %9s %14s %14s %12s %7s\n", "base", "h_min", "triangles", "law_residual",
              "dissipation", "ratio", "newton");
  for (std::size_t k = 0; k < lv.size(); ++k) {
    std::printf("%6d %10.6f %9d %14.6e %14.6e %12.4e %7d\n", lv[k].n, lv[k].h_min,
                lv[k].triangles, lv[k].law_residual, lv[k].dissipation, lv[k].ratio,
                lv[k].newton_iters);
    if (k > 0 && !(lv[k].ratio < lv[k - 1].ratio)) ok = false;
  }
  if (!lv.empty() && !(lv.back().ratio < tol)) ok = false;
  std::printf("%s: ratio decreasing and finest < %.1e\n", ok ? "PASS" : "FAIL", tol);
  return ok ? 0 : 1;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"nsch: variable-density Navier-Stokes-Cahn-Hilliard solver"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config, preset_name, out;
  int steps = -1;
  auto* run = app.add_subcommand("run", "run a configuration and write outputs");
  auto* cfg_opt = run->add_option("--config", config, "config file")->check(CLI::ExistingFile);
  run->add_option("--preset", preset_name, "named preset")
      ->check(CLI::IsMember(preset_names()))
      ->excludes(cfg_opt);
  run->add_option("--out", out, "output directory (overrides the config)");
  run->add_option("--steps", steps, "number of steps (overrides t_end)");

  auto* presets = app.add_subcommand("presets", "list presets or print one as a config file");
  std::string show;
  presets->add_option("name", show)->check(CLI::IsMember(preset_names()));

  auto* verify = app.add_subcommand("verify", "numerical self-checks");
  verify->require_subcommand(1);
  std::string vpreset = "kissing-1to10";
  int vn = 16, directions = 10, levels = 3;
  double jtol = 1e-6, ltol = 1e-2;
  auto* jac = verify->add_subcommand("jacobian", "compare the Jacobian with finite differences");
  jac->add_option("--preset", vpreset)->check(CLI::IsMember(preset_names()));
  jac->add_option("--n", vn, "mesh is n x n")->check(CLI::PositiveNumber);
  jac->add_option("--directions", directions)->check(CLI::PositiveNumber);
  jac->add_option("--tol", jtol);
  auto* law = verify->add_subcommand("energy-law", "discrete energy law under refinement");
  law->add_option("--preset", vpreset)->check(CLI::IsMember(preset_names()));
  law->add_option("--base", vn, "base mesh is n x n; level k adapts to h_min = 1/(n 2^k)")->check(CLI::PositiveNumber);
  law->add_option("--levels", levels)->check(CLI::PositiveNumber);
  law->add_option("--tol", ltol);
  bool uniform = false;
  law->add_flag("--uniform", uniform, "uniform n x n meshes instead of adapted ones");

  auto* sigma = app.add_subcommand("sigma", "surface tension of the tanh profile");
  PhysConstants sp;
  sp.eps = 0.01;
  sp.C = 0.01;
  sp.M = 10.0;
  sigma->add_option("--eps", sp.eps);
  sigma->add_option("--rho1", sp.rho1);
  sigma->add_option("--rho2", sp.rho2);
  sigma->add_option("--C", sp.C);
  sigma->add_option("--M", sp.M);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (config.empty() && preset_name.empty()) {
        std::cerr << "run: give --config or --preset" << std::endl;
        return 2;
      }
      return cmd_run(config, preset_name, out, steps);
    }
    if (*presets) {
      if (show.empty()) {
        for (const auto& n : preset_names()) std::cout << n << "\n";
      } else {
        std::cout << format_config(preset(show));
      }
      return 0;
    }
    if (*jac) return cmd_jacobian(vpreset, vn, directions, jtol);
    if (*law) return cmd_energy_law(vpreset, vn, levels, ltol, uniform);
    if (*sigma) {
      sp.rho0 = sp.rho2;
      PhysParams p(sp);
      const double s = sigma_tanh_profile(p);
      std::printf("sigma = %.12g\n", s);
      std::printf("closed form (C/M) sqrt2/(12 eps) = %.12g\n",
                  p.C() / p.M() * std::sqrt(2.0) / (12.0 * p.eps()));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}

}  // namespace nsch
