#pragma once

#include <array>
#include <string>
#include <vector>

#include "chemsim/grid.hpp"
#include "chemsim/model.hpp"
#include "chemsim/stepper.hpp"

namespace chemsim {

// One product-cosine component a * prod_i cos(k_i pi (x_i - lo_i) / L_i).
// Every such component has an exactly vanishing normal derivative on the
// boundary, so the Neumann admissibility of the test class is analytic.
struct SpatialMode {
  std::array<int, 2> k{0, 0};
  double amplitude = 0.0;
};

enum class WindowKind {
  interior_bump,   // eta = exp(-1/(1-s^2)) on (t1, t2), zero outside
  initial_window,  // eta(0) = 1, smooth monotone cutoff, zero beyond t2
};

// Separable space-time test function phi(x, t) = phi_x(x) * eta(t) with
// closed-form values, gradients, Laplacian and time derivative. phi >= 0
// whenever c0 >= sum |amplitudes| (enforced at construction).
struct TestFunction {
  std::string id;
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> len{1.0, 1.0};

  double c0 = 0.0;
  std::vector<SpatialMode> modes;

  WindowKind kind = WindowKind::interior_bump;
  double t1 = 0.0, t2 = 0.0;  // initial_window uses [0, t2)

  double phi_x(double x, double y) const;
  std::array<double, 2> grad_phi_x(double x, double y) const;
  double lap_phi_x(double x, double y) const;
  double eta(double t) const;
  double eta_dot(double t) const;
  double value(double x, double y, double t) const { return phi_x(x, y) * eta(t); }
};

// Builds and validates a test function for the given grid geometry and
// horizon. Requires window in [0, T] (interior_bump: 0 <= t1 < t2 <= T;
// initial_window: 0 < t2 <= T, t1 ignored), nonzero mode amplitudes,
// nonnegative mode indices matching the dimension, and c0 >= sum |a_k|.
TestFunction make_test_function(const Grid& g, double T, double c0,
                                const std::vector<SpatialMode>& modes,
                                WindowKind kind, double t1, double t2,
                                const std::string& id = "");

// The two evaluation flavours of each residual. `regularized` keeps the
// eps-dependent factors of the computed system, making each form an identity
// whose residual is pure discretization error; `limit` evaluates the eps = 0
// integrands on the same fields, so the inequality forms may carry a
// one-sided gap while the v-form shows the O(eps) regularization gap.
enum class ResidualMode { regularized, limit };

struct ResidualDetail {
  double residual = 0.0;
  double scale = 0.0;  // largest |integral term|, used for tolerances
};

// Mass form: residual = RHS - LHS of
//   -int int phi_t u - int u0 phi(.,0)
//     <= int int u lap phi + chi int int fac(u) grad phi . grad log v
//        + kappa int int u phi - mu int int u^2 phi,
// fac(u) = u/(1+eps u) (regularized) or u (limit). Nonnegative residuals
// certify the inequality; the regularized residual is an identity defect.
ResidualDetail subsolution_detail(const Trajectory& traj, const TestFunction& phi,
                                  ResidualMode mode);
double subsolution_residual(const Trajectory& traj, const TestFunction& phi,
                            ResidualMode mode);

// Signal form: residual = LHS - RHS of
//   -int int psi_t v - int v0 psi(.,0)
//     = -int int grad v . grad psi - int int psi cons(u, v),
// cons = u v / ((1+eps u)(1+eps v)) (regularized) or u v (limit).
ResidualDetail v_identity_detail(const Trajectory& traj, const TestFunction& psi,
                                 ResidualMode mode);
double v_identity_residual(const Trajectory& traj, const TestFunction& psi,
                           ResidualMode mode);

// Logarithmic form: residual = LHS - RHS of
//   -int int log(u+1) phi_t - int log(u0+1) phi(.,0)
//     >= -int int grad log(u+1) . grad phi + int int phi |grad log(u+1)|^2
//        + chi int int F grad log v . grad phi
//        - chi int int F phi grad log v . grad log(u+1)
//        + kappa int int (u/(u+1)) phi - mu int int (u^2/(u+1)) phi,
// F = u/((1+eps u)(u+1)) (regularized) or u/(u+1) (limit).
ResidualDetail supersolution_detail(const Trajectory& traj, const TestFunction& phi,
                                    ResidualMode mode);
double supersolution_residual(const Trajectory& traj, const TestFunction& phi,
                              ResidualMode mode);

struct WeakFormRow {
  std::string testfn_id;
  std::string mode;  // "regularized" | "limit"
  double S = 0.0;    // mass form
  double V = 0.0;    // signal form
  double L = 0.0;    // logarithmic form
  double tol = 0.0;
  bool pass = false;
};

struct GapRow {
  std::string testfn_id;
  double dS = 0.0, dV = 0.0, dL = 0.0;  // limit minus regularized
};

struct WeakFormReport {
  double h = 0.0;
  double dt = 0.0;  // largest accepted step of the audited run
  int snapshot_count = 0;
  double tol_factor = 10.0;
  std::vector<WeakFormRow> rows;  // two rows (modes) per test function
  std::vector<GapRow> gaps;
  bool pass = false;
};

// Evaluates all three residuals for every test function in both modes.
// Row tolerance: tol_factor * (h + dt) * (largest |integral term| across the
// row's three forms). A regularized row passes when max(|S|,|V|,|L|) <= tol;
// a limit row passes when S >= -tol and L >= -tol (its V is reported as the
// regularization gap, not gated). The report passes when every row does.
// Requires a nonempty suite; each window must contain at least 8 snapshots.
WeakFormReport audit(const Trajectory& traj, const std::vector<TestFunction>& suite,
                     double tol_factor = 10.0);

// The standard six-function suite: {constant, 1 + first cosine mode} x
// {early bump (0.1T, 0.5T), late bump (0.4T, 0.9T), initial window (0.5T)}.
std::vector<TestFunction> default_suite(const Grid& g, double T);

// CSV: testfn_id,mode,S,V,L,tol,pass
std::string weakform_report_csv(const WeakFormReport& report);

}  // namespace chemsim
