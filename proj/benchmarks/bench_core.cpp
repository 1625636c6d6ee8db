#include <benchmark/benchmark.h>

#include <cmath>

#include "chemsim/estimates.hpp"
#include "chemsim/grid.hpp"
#include "chemsim/model.hpp"
#include "chemsim/stepper.hpp"
#include "chemsim/weakform.hpp"

namespace {

using namespace chemsim;

ModelParams standard_params() {
  ModelParams p;
  p.chi = 2.0;
  p.kappa = 1.0;
  p.mu = 0.5;
  p.eps = 0.1;
  p.t_end = 1.0;
  return p;
}

State bump_state(const Grid& g) {
  State s;
  s.u.resize(g.cells());
  s.v.resize(g.cells());
  for (int iy = 0; iy < g.n[1]; ++iy)
    for (int ix = 0; ix < g.n[0]; ++ix) {
      double x = g.center(0, ix);
      double y = g.dim == 2 ? g.center(1, iy) : 0.0;
      double r2 = (x - 0.5) * (x - 0.5) + (g.dim == 2 ? (y - 0.5) * (y - 0.5) : 0.0);
      int i = g.index(ix, iy);
      s.u[i] = 2.0 * std::exp(-r2 / 0.02);
      s.v[i] = 1.0 + 0.3 * std::cos(3.14159265358979323846 * (x - g.lo[0]) / g.length(0));
    }
  return s;
}

void BM_laplacian_1d(benchmark::State& state) {
  Grid g = build_grid(0.0, 1.0, static_cast<int>(state.range(0)));
  State s = bump_state(g);
  for (auto _ : state) {
    Field lap = laplacian(s.v, g);
    benchmark::DoNotOptimize(lap.data());
  }
  state.SetItemsProcessed(state.iterations() * g.cells());
}
BENCHMARK(BM_laplacian_1d)->Arg(256)->Arg(4096);

void BM_chemotactic_flux_1d(benchmark::State& state) {
  Grid g = build_grid(0.0, 1.0, static_cast<int>(state.range(0)));
  State s = bump_state(g);
  ModelParams p = standard_params();
  for (auto _ : state) {
    FaceField f = chemotactic_flux(s, p, g);
    benchmark::DoNotOptimize(f.axis[0].data());
  }
  state.SetItemsProcessed(state.iterations() * g.cells());
}
BENCHMARK(BM_chemotactic_flux_1d)->Arg(256)->Arg(4096);

void BM_step_1d(benchmark::State& state) {
  Grid g = build_grid(0.0, 1.0, static_cast<int>(state.range(0)));
  State s = bump_state(g);
  ModelParams p = standard_params();
  StepConfig c;
  double dt = admissible_dt(s, p, g, c);
  for (auto _ : state) {
    State next = step(s, p, g, dt);
    benchmark::DoNotOptimize(next.u.data());
  }
  state.SetItemsProcessed(state.iterations() * g.cells());
}
BENCHMARK(BM_step_1d)->Arg(256)->Arg(4096);

void BM_step_2d(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Grid g = build_grid(2, {0.0, 0.0}, {1.0, 1.0}, {n, n});
  State s = bump_state(g);
  ModelParams p = standard_params();
  StepConfig c;
  c.cfl_safety = 0.2;
  double dt = admissible_dt(s, p, g, c);
  for (auto _ : state) {
    State next = step(s, p, g, dt);
    benchmark::DoNotOptimize(next.u.data());
  }
  state.SetItemsProcessed(state.iterations() * g.cells());
}
BENCHMARK(BM_step_2d)->Arg(64)->Arg(128);

void BM_ledger_accumulate(benchmark::State& state) {
  Grid g = build_grid(0.0, 1.0, static_cast<int>(state.range(0)));
  State s = bump_state(g);
  ModelParams p = standard_params();
  double dt = 1e-3;
  State next = step(s, p, g, dt);
  next.t = dt;
  for (auto _ : state) {
    EstimateLedger led = make_ledger(s.u, s.v, p, g, p.t_end);
    accumulate(led, s, next, dt, g, p);
    benchmark::DoNotOptimize(led.acc_u_sq);
  }
  state.SetItemsProcessed(state.iterations() * g.cells());
}
BENCHMARK(BM_ledger_accumulate)->Arg(256)->Arg(4096);

void BM_weakform_residual(benchmark::State& state) {
  Grid g = build_grid(0.0, 1.0, 128);
  State s = bump_state(g);
  ModelParams p = standard_params();
  StepConfig c;
  c.dt_max = 5e-3;
  c.snapshot_every = 0.02;
  Trajectory traj = run(s.u, s.v, p, g, c);
  TestFunction phi = make_test_function(
      g, p.t_end, 1.0, {SpatialMode{{1, 0}, 1.0}}, WindowKind::interior_bump,
      0.1, 0.5, "bench");
  for (auto _ : state) {
    double r = subsolution_residual(traj, phi, ResidualMode::regularized);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_weakform_residual);

}  // namespace

BENCHMARK_MAIN();
