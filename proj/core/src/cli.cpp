#include "chemsim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "chemsim/errors.hpp"
#include "chemsim/numfmt.hpp"
#include "chemsim/snapshot.hpp"
#include "chemsim/stepper.hpp"

namespace chemsim {

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw io_error("write failed for '" + path.string() + "'");
}

const char* verdict(bool b) { return b ? "pass" : "FAIL"; }

struct RunOutputs {
  Trajectory traj;
  std::vector<CheckRow> checks;
  bool checks_pass = true;
};

RunOutputs integrate_and_check(const RunConfig& cfg) {
  Grid g = grid_from_config(cfg);
  auto [u0, v0] = build_initial_data(cfg, g);
  StepConfig sc = step_config_from(cfg);

  RunOutputs out{run(u0, v0, cfg.params, g, sc), {}, true};
  const EstimateLedger& led = out.traj.ledger;
  out.checks = check(led, led.bounds, led.t);

  // Consumption-rate accumulation against the mass bound, gated like the
  // ledger rows.
  CheckRow c;
  c.lemma_id = "consumption_vs_mass";
  c.value = led.acc_consumption_rate;
  c.bound = led.bounds.C1 * led.bounds.T;
  c.margin = consumption_vs_mass_check(led);
  c.tol = 1e-6 + 10.0 * (g.max_h() + led.max_dt);
  c.pass = check_pass(c.value, c.bound, c.tol);
  out.checks.push_back(c);

  for (const auto& r : out.checks) out.checks_pass = out.checks_pass && r.pass;
  return out;
}

void write_run_outputs(const RunConfig& cfg, const RunOutputs& r) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir / "snapshots");
  write_text(dir / "ledger.csv", ledger_csv(r.traj.ledger.rows));
  write_text(dir / "checks.csv", checks_csv(r.checks));
  char name[32];
  for (std::size_t i = 0; i < r.traj.snapshots.size(); ++i) {
    std::snprintf(name, sizeof name, "snap_%06zu.bin", i);
    write_snapshot((dir / "snapshots" / name).string(), r.traj.snapshots[i],
                   r.traj.grid);
  }
}

void print_run_summary(const Trajectory& traj) {
  const StepStats& st = traj.stats;
  std::cout << "steps: " << st.steps << "  dt range: [" << g17(st.dt_min) << ", "
            << g17(st.dt_max_used) << "]\n"
            << "min u: " << g17(st.min_u) << "  min v: " << g17(st.min_v) << "\n"
            << "v lower-bound ratio (expected >= 1 - 1e-8): "
            << g17(st.min_lower_bound_ratio) << "\n"
            << "max ||v||_inf growth per step (expected <= 1e-12): "
            << g17(st.max_supnorm_growth) << "\n"
            << "snapshots: " << traj.snapshots.size() << "\n";
}

void print_checks(const std::vector<CheckRow>& checks) {
  std::cout << "estimate checks:\n";
  for (const auto& c : checks)
    std::cout << "  " << verdict(c.pass) << "  " << c.lemma_id << ": value "
              << g17(c.value) << " vs bound " << g17(c.bound) << " (margin "
              << g17(c.margin) << ", tol " << g17(c.tol) << ")\n";
}

int cmd_run(const std::string& path) {
  RunConfig cfg = load_config_file(path);
  RunOutputs r = integrate_and_check(cfg);
  write_run_outputs(cfg, r);
  print_run_summary(r.traj);
  print_checks(r.checks);
  std::cout << "RESULT: " << (r.checks_pass ? "all estimate checks passed" : "estimate check failure")
            << "\n";
  return r.checks_pass ? 0 : 2;
}

int cmd_audit(const std::string& path) {
  RunConfig cfg = load_config_file(path);
  RunOutputs r = integrate_and_check(cfg);
  write_run_outputs(cfg, r);

  std::vector<TestFunction> suite = suite_from_config(cfg, r.traj.grid);
  WeakFormReport rep = audit(r.traj, suite, cfg.tol_factor);
  write_text(fs::path(cfg.output_dir) / "weakform.csv", weakform_report_csv(rep));

  print_run_summary(r.traj);
  print_checks(r.checks);
  std::cout << "weak-form audit (tol_factor " << g17(rep.tol_factor) << ", h "
            << g17(rep.h) << ", dt " << g17(rep.dt) << "):\n";
  for (const auto& row : rep.rows)
    std::cout << "  " << verdict(row.pass) << "  " << row.testfn_id << " [" << row.mode
              << "]: S " << g17(row.S) << "  V " << g17(row.V) << "  L " << g17(row.L)
              << "  tol " << g17(row.tol) << "\n";
  for (const auto& gap : rep.gaps)
    std::cout << "  gap   " << gap.testfn_id << ": dS " << g17(gap.dS) << "  dV "
              << g17(gap.dV) << "  dL " << g17(gap.dL) << "\n";

  bool ok = r.checks_pass && rep.pass;
  std::cout << "RESULT: " << (ok ? "estimate checks and weak-form audit passed"
                                 : "verification failure")
            << "\n";
  return ok ? 0 : 2;
}

void print_sweep(const SweepResult& res) {
  for (const auto& row : res.rows)
    std::cout << "  " << res.axis << " " << g17(row.axis_value) << "  " << row.norm_name
              << ": difference " << g17(row.difference) << "  fitted order "
              << g17(row.fitted_order) << "\n";
  for (const auto& f : res.failures) std::cout << "  failed run: " << f << "\n";
}

int cmd_sweep_eps(const std::string& path) {
  RunConfig cfg = load_config_file(path);
  Grid g = grid_from_config(cfg);
  auto [u0, v0] = build_initial_data(cfg, g);
  StepConfig sc = step_config_from(cfg);

  SweepResult res = epsilon_sweep(u0, v0, cfg.params, g, sc, cfg.eps_list);
  fs::create_directories(cfg.output_dir);
  write_text(fs::path(cfg.output_dir) / "sweep_eps.csv", sweep_csv(res));

  std::cout << "regularization sweep (" << res.samples.size() << " runs):\n";
  print_sweep(res);
  bool ok = res.failures.empty();
  std::cout << "RESULT: " << (ok ? "sweep completed" : "sweep runs failed") << "\n";
  return ok ? 0 : 2;
}

int cmd_refine(const std::string& path) {
  RunConfig cfg = load_config_file(path);
  Grid g = grid_from_config(cfg);
  StepConfig sc = step_config_from(cfg);

  RefinementSpec spec;
  spec.levels = cfg.refine_levels;
  spec.dt_power = cfg.refine_dt_power;
  spec.dt0 = cfg.refine_dt0;

  InitialSampler sampler = [cfg](const Grid& gg) { return build_initial_data(cfg, gg); };
  SweepResult res = refinement_study(sampler, cfg.params, g, sc, spec);
  fs::create_directories(cfg.output_dir);
  write_text(fs::path(cfg.output_dir) / "refine.csv", sweep_csv(res));

  std::cout << "refinement study (" << spec.levels << " levels):\n";
  print_sweep(res);
  bool ok = res.failures.empty();
  std::cout << "RESULT: " << (ok ? "refinement completed" : "refinement runs failed") << "\n";
  return ok ? 0 : 2;
}

int cmd_oracle(const std::string& path) {
  RunConfig cfg = load_config_file(path);
  if (cfg.u0.kind != "constant" || cfg.v0.kind != "constant")
    throw config_error(
        "config: oracle requires constant initial profiles (the reference solves the "
        "spatially uniform system)");

  Grid g = grid_from_config(cfg);
  auto [u0, v0] = build_initial_data(cfg, g);
  StepConfig sc = step_config_from(cfg);
  Trajectory traj = run(u0, v0, cfg.params, g, sc);

  const State& fin = traj.snapshots.back();
  const double mean_u = integrate(fin.u, g) / g.domain_measure;
  const double mean_v = integrate(fin.v, g) / g.domain_measure;
  const double T = cfg.params.t_end;
  const double uc = cfg.u0.args[0];
  const double vc = cfg.v0.args[0];
  OracleResult ref = ode_oracle(uc, vc, cfg.params, T);

  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
  };
  const double err_u = rel(mean_u, ref.u);
  const double err_v = rel(mean_v, ref.v);

  // Reference self-consistency: its eps -> 0 endpoint against the closed form
  // of the unregularized uniform system.
  const double v_small_eps = oracle_v_rk4(uc, vc, cfg.params.kappa, cfg.params.mu, 1e-3, T);
  const double v_limit = limit_v_closed_form(uc, vc, cfg.params.kappa, cfg.params.mu, T);
  const double err_limit = rel(v_small_eps, v_limit);

  std::string csv = "quantity,solver,reference,rel_err\n";
  csv += "u," + g17(mean_u) + "," + g17(ref.u) + "," + g17(err_u) + "\n";
  csv += "v," + g17(mean_v) + "," + g17(ref.v) + "," + g17(err_v) + "\n";
  csv += "v_eps_to_zero," + g17(v_small_eps) + "," + g17(v_limit) + "," + g17(err_limit) + "\n";
  fs::create_directories(cfg.output_dir);
  write_text(fs::path(cfg.output_dir) / "oracle.csv", csv);

  bool ok = err_u <= cfg.oracle_rtol && err_v <= cfg.oracle_rtol;
  std::cout << "uniform-data comparison at T = " << g17(T) << " (rtol "
            << g17(cfg.oracle_rtol) << "):\n"
            << "  " << verdict(err_u <= cfg.oracle_rtol) << "  u: solver " << g17(mean_u)
            << "  reference " << g17(ref.u) << "  rel err " << g17(err_u) << "\n"
            << "  " << verdict(err_v <= cfg.oracle_rtol) << "  v: solver " << g17(mean_v)
            << "  reference " << g17(ref.v) << "  rel err " << g17(err_v) << "\n"
            << "  info  reference at eps = 1e-3: " << g17(v_small_eps)
            << "  closed form at eps = 0: " << g17(v_limit) << "  rel gap "
            << g17(err_limit) << "\n"
            << "RESULT: " << (ok ? "solver matches the reference" : "reference mismatch")
            << "\n";
  return ok ? 0 : 2;
}

int cmd_bounds(const std::string& path) {
  RunConfig cfg = load_config_file(path);
  Grid g = grid_from_config(cfg);
  auto [u0, v0] = build_initial_data(cfg, g);
  BoundConstants b = bounds_from_data(u0, v0, cfg.params, g, cfg.params.t_end);
  std::cout << bounds_table(b);
  return 0;
}

}  // namespace

std::string ledger_csv(const std::vector<LedgerRow>& rows) {
  std::string out =
      "t,int_u,grad_v_sq,log_v_l1,v_sup,acc_u_sq,acc_grad_log_v_sq,"
      "acc_grad_log_u1_sq,acc_grad_u_l1,acc_lap_v_sq,acc_v_t_sq,acc_log_v_sq,"
      "acc_consumption,acc_consumption_rate\n";
  for (const auto& r : rows) {
    out += g17(r.t) + "," + g17(r.int_u) + "," + g17(r.grad_v_sq) + "," +
           g17(r.log_v_l1) + "," + g17(r.v_sup) + "," + g17(r.acc_u_sq) + "," +
           g17(r.acc_grad_log_v_sq) + "," + g17(r.acc_grad_log_u1_sq) + "," +
           g17(r.acc_grad_u_l1) + "," + g17(r.acc_lap_v_sq) + "," + g17(r.acc_v_t_sq) +
           "," + g17(r.acc_log_v_sq) + "," + g17(r.acc_consumption) + "," +
           g17(r.acc_consumption_rate) + "\n";
  }
  return out;
}

std::string checks_csv(const std::vector<CheckRow>& rows) {
  std::string out = "lemma_id,value,bound,margin,tol,pass\n";
  for (const auto& r : rows)
    out += r.lemma_id + "," + g17(r.value) + "," + g17(r.bound) + "," + g17(r.margin) +
           "," + g17(r.tol) + "," + (r.pass ? "1" : "0") + "\n";
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "axis,axis_value,norm,difference,fitted_order,ok\n";
  for (const auto& r : result.rows)
    out += result.axis + "," + g17(r.axis_value) + "," + r.norm_name + "," +
           g17(r.difference) + "," + g17(r.fitted_order) + "," + (r.ok ? "1" : "0") + "\n";
  return out;
}

std::string bounds_table(const BoundConstants& b) {
  std::string out;
  auto row = [&out](const char* name, double value, const char* meaning) {
    out += name;
    out += " = " + g17(value) + "    # ";
    out += meaning;
    out += "\n";
  };
  row("T  ", b.T, "horizon");
  row("C1 ", b.C1, "sup_t ||u||_L1");
  row("C2 ", b.C2, "int_0^T int u^2");
  row("C3 ", b.C3, "int_0^T int |grad log v|^2");
  row("C4 ", b.C4, "int_0^T int |grad log(u+1)|^2");
  row("C5 ", b.C5, "int_0^T int |grad u|");
  row("C6 ", b.C6, "space-time mass/variation bound");
  row("C7 ", b.C7, "sup_t ||grad v||_L2");
  row("C8 ", b.C8, "||lap v||_L2 over space-time");
  row("C9 ", b.C9, "||v_t||_L2 over space-time");
  row("C10", b.C10, "sup_t ||log v||_L1");
  row("C11", b.C11, "||log v||_L2(W^{1,2}) over space-time");
  row("CP ", b.CP, "Poincare constant of the Neumann Laplacian");
  return out;
}

std::vector<TestFunction> suite_from_config(const RunConfig& cfg, const Grid& g) {
  const double T = cfg.params.t_end;
  if (cfg.spatial_modes == 2) return default_suite(g, T);
  std::vector<TestFunction> suite;
  for (int f = 0; f < cfg.spatial_modes; ++f) {
    std::vector<SpatialMode> modes;
    std::string family = "const";
    if (f > 0) {
      modes.push_back(SpatialMode{{f, g.dim == 2 ? f : 0}, 1.0});
      family = "cos" + std::to_string(f);
    }
    suite.push_back(make_test_function(g, T, 1.0, modes, WindowKind::interior_bump,
                                       0.1 * T, 0.5 * T, family + "_bump_early"));
    suite.push_back(make_test_function(g, T, 1.0, modes, WindowKind::interior_bump,
                                       0.4 * T, 0.9 * T, family + "_bump_late"));
    suite.push_back(make_test_function(g, T, 1.0, modes, WindowKind::initial_window,
                                       0.0, 0.5 * T, family + "_initial"));
  }
  return suite;
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "chemsim: finite-volume solver for a chemotaxis-consumption system with a "
      "runtime estimate ledger and a weak-form residual audit"};
  app.require_subcommand(1);

  std::string config_path;
  auto add = [&](const char* name, const char* desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("config", config_path, "path to the run configuration file")
        ->required();
    return sub;
  };
  add("run", "integrate and write ledger.csv, checks.csv and snapshots/");
  add("audit", "run, then evaluate the weak-form test suite");
  add("sweep-eps", "regularization sweep with Cauchy differences");
  add("refine", "space/time refinement study");
  add("oracle", "compare a uniform run against the ODE reference");
  add("bounds", "print the a priori bound constants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("run")) return cmd_run(config_path);
    if (app.got_subcommand("audit")) return cmd_audit(config_path);
    if (app.got_subcommand("sweep-eps")) return cmd_sweep_eps(config_path);
    if (app.got_subcommand("refine")) return cmd_refine(config_path);
    if (app.got_subcommand("oracle")) return cmd_oracle(config_path);
    return cmd_bounds(config_path);
  } catch (const solver_error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace chemsim
