#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "chemsim/convergence.hpp"
#include "chemsim/grid.hpp"
#include "chemsim/model.hpp"
#include "chemsim/stepper.hpp"
#include "chemsim/weakform.hpp"
#include "doctest.h"

using namespace chemsim;

namespace {

ModelParams params(double chi, double kappa, double mu, double eps, double T) {
  ModelParams p;
  p.chi = chi;
  p.kappa = kappa;
  p.mu = mu;
  p.eps = eps;
  p.t_end = T;
  return p;
}

Field gaussian(const Grid& g, double c, double w, double a, double floor = 0.0) {
  Field f(static_cast<size_t>(g.cells()));
  for (int i = 0; i < g.n[0]; ++i)
    f[static_cast<size_t>(i)] =
        floor + a * std::exp(-std::pow(g.center(0, i) - c, 2) / (2.0 * w * w));
  return f;
}

Field cosine1(const Grid& g, double amp, double off) {
  Field f(static_cast<size_t>(g.cells()));
  for (int i = 0; i < g.n[0]; ++i)
    f[static_cast<size_t>(i)] = off + amp * std::cos(M_PI * g.center(0, i));
  return f;
}

}  // namespace

TEST_CASE("spatial part: constant and single-mode values, gradients, Laplacians") {
  Grid g = build_grid(0.0, 1.0, 16);

  TestFunction cst = make_test_function(g, 1.0, 1.0, {},
                                        WindowKind::interior_bump, 0.1, 0.5);
  CHECK(cst.phi_x(0.37, 0.0) == 1.0);
  CHECK(cst.grad_phi_x(0.37, 0.0)[0] == 0.0);
  CHECK(cst.lap_phi_x(0.37, 0.0) == 0.0);

  TestFunction one = make_test_function(g, 1.0, 1.0, {SpatialMode{{1, 0}, 1.0}},
                                        WindowKind::interior_bump, 0.1, 0.5);
  const double x = 0.25;
  CHECK(one.phi_x(x, 0.0) == doctest::Approx(1.0 + std::cos(M_PI * x)).epsilon(1e-15));
  CHECK(one.grad_phi_x(x, 0.0)[0] ==
        doctest::Approx(-M_PI * std::sin(M_PI * x)).epsilon(1e-15));
  CHECK(one.lap_phi_x(x, 0.0) ==
        doctest::Approx(-M_PI * M_PI * std::cos(M_PI * x)).epsilon(1e-15));

  // Neumann admissibility: normal derivative vanishes on the boundary
  for (int k = 1; k <= 3; ++k) {
    TestFunction tf = make_test_function(g, 1.0, 1.0, {SpatialMode{{k, 0}, 1.0}},
                                         WindowKind::interior_bump, 0.1, 0.5);
    CHECK(std::abs(tf.grad_phi_x(0.0, 0.0)[0]) <= 1e-13);
    CHECK(std::abs(tf.grad_phi_x(1.0, 0.0)[0]) <= 1e-13);
  }
}

TEST_CASE("spatial part: 2D product mode on an anisotropic box") {
  Grid g = build_grid(2, {0.0, 0.0}, {1.0, 2.0}, {8, 8});
  TestFunction tf = make_test_function(g, 1.0, 1.5, {SpatialMode{{1, 1}, 1.5}},
                                       WindowKind::interior_bump, 0.1, 0.5);
  const double x = 0.25, y = 0.5;
  const double cx = std::cos(M_PI * x), sx = std::sin(M_PI * x);
  const double cy = std::cos(M_PI * y / 2.0), sy = std::sin(M_PI * y / 2.0);
  CHECK(tf.phi_x(x, y) == doctest::Approx(1.5 + 1.5 * cx * cy).epsilon(1e-15));
  auto gr = tf.grad_phi_x(x, y);
  CHECK(gr[0] == doctest::Approx(-1.5 * M_PI * sx * cy).epsilon(1e-14));
  CHECK(gr[1] == doctest::Approx(-1.5 * (M_PI / 2.0) * cx * sy).epsilon(1e-14));
  CHECK(tf.lap_phi_x(x, y) ==
        doctest::Approx(-1.5 * (M_PI * M_PI + M_PI * M_PI / 4.0) * cx * cy)
            .epsilon(1e-14));
}

TEST_CASE("every generated test function stays nonnegative at random samples") {
  Grid g = build_grid(0.0, 2.0, 8);
  std::vector<SpatialMode> modes{SpatialMode{{1, 0}, 0.6},
                                 SpatialMode{{3, 0}, -0.4}};
  // tight case: c0 equals the amplitude sum, so phi can touch zero
  TestFunction tight = make_test_function(g, 1.0, 1.0, modes,
                                          WindowKind::interior_bump, 0.1, 0.5);
  TestFunction safe = make_test_function(g, 1.0, 1.25, modes,
                                         WindowKind::initial_window, 0.0, 0.5);
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> ux(0.0, 2.0), ut(0.0, 1.0);
  for (int k = 0; k < 10000; ++k) {
    double x = ux(rng), t = ut(rng);
    CHECK(tight.value(x, 0.0, t) >= -1e-12);
    CHECK(safe.value(x, 0.0, t) >= 0.0);
  }
}

TEST_CASE("interior bump window: support, symmetry and derivative") {
  Grid g = build_grid(0.0, 1.0, 8);
  TestFunction tf = make_test_function(g, 1.0, 1.0, {},
                                       WindowKind::interior_bump, 0.2, 0.6);
  CHECK(tf.eta(0.0) == 0.0);
  CHECK(tf.eta(0.2) == 0.0);
  CHECK(tf.eta(0.6) == 0.0);
  CHECK(tf.eta(0.95) == 0.0);
  CHECK(tf.eta(0.4) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  // s = 1/2 halfway out: exp(-1/(1 - 1/4))
  CHECK(tf.eta(0.5) == doctest::Approx(std::exp(-4.0 / 3.0)).epsilon(1e-14));
  CHECK(tf.eta(0.3) == doctest::Approx(tf.eta(0.5)).epsilon(1e-14));
  CHECK(tf.eta_dot(0.4) == 0.0);
  CHECK(tf.eta_dot(0.3) > 0.0);
  CHECK(tf.eta_dot(0.5) < 0.0);
  CHECK(tf.eta_dot(0.0) == 0.0);
  CHECK(tf.eta_dot(0.7) == 0.0);

  const double t = 0.33, d = 1e-6;
  double num = (tf.eta(t + d) - tf.eta(t - d)) / (2.0 * d);
  CHECK(tf.eta_dot(t) == doctest::Approx(num).epsilon(1e-6));
}

TEST_CASE("initial window: starts at one, decays smoothly to zero") {
  Grid g = build_grid(0.0, 1.0, 8);
  TestFunction tf = make_test_function(g, 1.0, 1.0, {},
                                       WindowKind::initial_window, 0.0, 0.5);
  CHECK(tf.eta(0.0) == 1.0);
  CHECK(tf.eta(0.25) == 0.5);  // midpoint of the symmetric smoothstep
  CHECK(tf.eta(0.5) == 0.0);
  CHECK(tf.eta(0.8) == 0.0);
  CHECK(tf.eta_dot(0.0) == 0.0);
  CHECK(tf.eta_dot(0.5) == 0.0);
  CHECK(tf.eta_dot(0.25) < 0.0);
  for (double t : {0.05, 0.15, 0.25, 0.35, 0.45})
    CHECK(tf.eta(t) > tf.eta(t + 0.049));

  const double t = 0.3, d = 1e-6;
  double num = (tf.eta(t + d) - tf.eta(t - d)) / (2.0 * d);
  CHECK(tf.eta_dot(t) == doctest::Approx(num).epsilon(1e-6));
}

TEST_CASE("test-function construction rejects inadmissible inputs") {
  Grid g = build_grid(0.0, 1.0, 8);
  std::vector<SpatialMode> m1{SpatialMode{{1, 0}, 1.0}};
  // nonnegativity violated
  CHECK_THROWS_AS(make_test_function(g, 1.0, 0.5, m1, WindowKind::interior_bump,
                                     0.1, 0.5),
                  std::invalid_argument);
  // windows outside [0, T]
  CHECK_THROWS_AS(make_test_function(g, 1.0, 1.0, m1, WindowKind::interior_bump,
                                     0.5, 1.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_test_function(g, 1.0, 1.0, m1, WindowKind::interior_bump,
                                     -0.1, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_test_function(g, 1.0, 1.0, m1, WindowKind::interior_bump,
                                     0.5, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_test_function(g, 1.0, 1.0, m1, WindowKind::initial_window,
                                     0.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_test_function(g, 1.0, 1.0, m1, WindowKind::initial_window,
                                     0.0, 1.5),
                  std::invalid_argument);
  // degenerate modes
  CHECK_THROWS_AS(make_test_function(g, 1.0, 1.0, {SpatialMode{{0, 0}, 1.0}},
                                     WindowKind::interior_bump, 0.1, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_test_function(g, 1.0, 1.0, {SpatialMode{{-1, 0}, 1.0}},
                                     WindowKind::interior_bump, 0.1, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_test_function(g, 1.0, 1.0, {SpatialMode{{1, 1}, 1.0}},
                                     WindowKind::interior_bump, 0.1, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_test_function(g, 1.0, 1.0, {SpatialMode{{1, 0}, 0.0}},
                                     WindowKind::interior_bump, 0.1, 0.5),
                  std::invalid_argument);
}

TEST_CASE("dormant u zeroes the mass and logarithmic forms exactly") {
  const int n = 32;
  Grid g = build_grid(0.0, 1.0, n);
  Field u0(n, 0.0), v0(n, 1.5);
  ModelParams p = params(1.0, 1.0, 1.0, 0.1, 0.5);
  StepConfig c;
  c.dt_max = 2.5e-3;
  Trajectory traj = run(u0, v0, p, g, c);

  for (const TestFunction& tf : default_suite(g, 0.5)) {
    for (ResidualMode m : {ResidualMode::regularized, ResidualMode::limit}) {
      CHECK(subsolution_residual(traj, tf, m) == 0.0);
      CHECK(supersolution_residual(traj, tf, m) == 0.0);
      // constant v: only the time-derivative and data terms of the signal
      // form survive, and they cancel up to time-quadrature error
      CHECK(std::abs(v_identity_residual(traj, tf, m)) <= 1e-4);
    }
  }

  WeakFormReport rep = audit(traj, default_suite(g, 0.5));
  CHECK(rep.pass);
  for (const auto& gap : rep.gaps) {
    CHECK(gap.dS == 0.0);
    CHECK(gap.dL == 0.0);
  }
}

TEST_CASE("constant test function reduces the mass form to the logistic balance") {
  // uniform data: gradients vanish, so only -int int phi_t u and the
  // kappa/mu terms remain; the solver follows the logistic law to O(dt)
  const int n = 16;
  Grid g = build_grid(0.0, 1.0, n);
  Field u0(n, 0.5), v0(n, 1.0);
  ModelParams p = params(10.0, 1.0, 1.0, 0.1, 1.0);
  Trajectory traj = run_fixed_dt(u0, v0, p, g, StepConfig{}, 1e-3);

  TestFunction tf = make_test_function(g, 1.0, 1.0, {},
                                       WindowKind::interior_bump, 0.1, 0.5);
  ResidualDetail d = subsolution_detail(traj, tf, ResidualMode::limit);
  CHECK(d.scale > 0.0);
  CHECK(std::abs(d.residual) <= 1e-3 * d.scale);

  // with no gradient terms the two modes coincide bitwise
  CHECK(subsolution_residual(traj, tf, ResidualMode::regularized) == d.residual);

  // the logarithmic form obeys the same closed dynamics within O(dt)
  ResidualDetail l = supersolution_detail(traj, tf, ResidualMode::limit);
  CHECK(std::abs(l.residual) <= 1e-3 * std::max(1.0, l.scale));
}

TEST_CASE("identity-mode residuals are linear in the test function") {
  const int n = 32;
  Grid g = build_grid(0.0, 1.0, n);
  Field u0 = gaussian(g, 0.5, 0.1, 2.0, 0.1);
  Field v0 = cosine1(g, 0.3, 1.0);
  ModelParams p = params(2.0, 1.0, 0.5, 0.1, 0.5);
  StepConfig c;
  c.dt_max = 2.5e-3;
  Trajectory traj = run(u0, v0, p, g, c);

  TestFunction f1 = make_test_function(g, 0.5, 1.0, {},
                                       WindowKind::interior_bump, 0.05, 0.25);
  TestFunction f2 = make_test_function(g, 0.5, 1.0, {SpatialMode{{1, 0}, 1.0}},
                                       WindowKind::interior_bump, 0.05, 0.25);
  const double a = 0.7, b = 1.3;
  TestFunction f3 = make_test_function(g, 0.5, a + b,
                                       {SpatialMode{{1, 0}, b}},
                                       WindowKind::interior_bump, 0.05, 0.25);

  auto lin = [&](double (*res)(const Trajectory&, const TestFunction&,
                               ResidualMode)) {
    double r1 = res(traj, f1, ResidualMode::regularized);
    double r2 = res(traj, f2, ResidualMode::regularized);
    double r3 = res(traj, f3, ResidualMode::regularized);
    double want = a * r1 + b * r2;
    double denom = std::max({std::abs(r1), std::abs(r2), std::abs(r3), 1e-30});
    CHECK(std::abs(r3 - want) / denom <= 1e-10);
  };
  lin(&subsolution_residual);
  lin(&v_identity_residual);
  lin(&supersolution_residual);
}

TEST_CASE("regularized residuals converge under joint space-time refinement") {
  ModelParams p = params(2.0, 1.0, 0.5, 0.1, 0.5);
  auto residuals_at = [&](int n, double dt) {
    Grid g = build_grid(0.0, 1.0, n);
    Field u0 = gaussian(g, 0.5, 0.1, 2.0, 0.1);
    Field v0 = cosine1(g, 0.3, 1.0);
    StepConfig c;
    c.snapshot_every = 0.5 / 200.0;
    Trajectory traj = run_fixed_dt(u0, v0, p, g, c, dt);
    TestFunction tf = make_test_function(g, 0.5, 1.0, {SpatialMode{{1, 0}, 1.0}},
                                         WindowKind::interior_bump, 0.05, 0.45);
    return std::array<double, 3>{
        std::abs(subsolution_residual(traj, tf, ResidualMode::regularized)),
        std::abs(v_identity_residual(traj, tf, ResidualMode::regularized)),
        std::abs(supersolution_residual(traj, tf, ResidualMode::regularized))};
  };

  auto r0 = residuals_at(16, 4e-3);
  auto r1 = residuals_at(32, 2e-3);
  auto r2 = residuals_at(64, 1e-3);
  std::vector<double> hs{1.0 / 16, 1.0 / 32, 1.0 / 64};
  for (int f = 0; f < 3; ++f) {
    CAPTURE(f);
    double order = fit_order(hs, {r0[static_cast<size_t>(f)],
                                  r1[static_cast<size_t>(f)],
                                  r2[static_cast<size_t>(f)]});
    CHECK(order >= 0.8);
  }
}

TEST_CASE("audit: standard configuration passes the six-function suite") {
  const int n = 64;
  Grid g = build_grid(0.0, 1.0, n);
  Field u0 = gaussian(g, 0.5, 0.1, 2.0);
  Field v0 = cosine1(g, 0.3, 1.0);
  ModelParams p = params(2.0, 1.0, 0.5, 0.1, 1.0);
  Trajectory traj = run(u0, v0, p, g, StepConfig{});

  std::vector<TestFunction> suite = default_suite(g, 1.0);
  REQUIRE(suite.size() == 6);
  WeakFormReport rep = audit(traj, suite);
  CHECK(rep.pass);
  REQUIRE(rep.rows.size() == 12);
  REQUIRE(rep.gaps.size() == 6);
  CHECK(rep.snapshot_count == static_cast<int>(traj.snapshots.size()));
  CHECK(rep.h == doctest::Approx(1.0 / n).epsilon(1e-15));
  CHECK(rep.dt > 0.0);
  for (const auto& row : rep.rows) {
    CAPTURE(row.testfn_id);
    CAPTURE(row.mode);
    CHECK(row.pass);
    CHECK(std::isfinite(row.S));
    CHECK(std::isfinite(row.V));
    CHECK(std::isfinite(row.L));
    CHECK(row.tol > 0.0);
  }

  std::string csv = weakform_report_csv(rep);
  std::istringstream lines(csv);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 13);
  CHECK(csv.rfind("testfn_id,mode,S,V,L,tol,pass\n", 0) == 0);
  CHECK(csv.find("const_initial,regularized,") != std::string::npos);
  CHECK(csv.find("cos1_bump_late,limit,") != std::string::npos);

  CHECK_THROWS_AS(audit(traj, {}), std::invalid_argument);
}

TEST_CASE("window and trajectory mismatches are rejected") {
  const int n = 16;
  Grid g = build_grid(0.0, 1.0, n);
  Field u0(n, 0.5), v0(n, 1.0);
  ModelParams p = params(1.0, 1.0, 1.0, 0.1, 0.5);
  StepConfig sparse;
  sparse.snapshot_every = 0.2;  // only a handful of snapshots
  Trajectory traj = run_fixed_dt(u0, v0, p, g, sparse, 1e-2);

  TestFunction thin = make_test_function(g, 0.5, 1.0, {},
                                         WindowKind::interior_bump, 0.05, 0.45);
  CHECK_THROWS_AS(subsolution_residual(traj, thin, ResidualMode::limit),
                  std::invalid_argument);

  // window made for a longer horizon than the trajectory
  TestFunction late = make_test_function(g, 2.0, 1.0, {},
                                         WindowKind::interior_bump, 1.0, 1.8);
  CHECK_THROWS_AS(v_identity_residual(traj, late, ResidualMode::limit),
                  std::invalid_argument);
}
