#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chemsim/grid.hpp"
#include "chemsim/model.hpp"
#include "chemsim/stepper.hpp"

namespace chemsim {

// ---- spatially-uniform reference solution ---------------------------------

// Logistic closed form: u' = kappa u - mu u^2, u(0) = u0.
double logistic_exact(double u0, double kappa, double mu, double t);

// Closed form of int_0^T u dt for the logistic solution.
double logistic_integral(double u0, double kappa, double mu, double T);

// RK4 integration (T/1e6 steps) of v' = -u(t) v / ((1+eps u(t))(1+eps v))
// with u(t) the logistic closed form; eps >= 0 allowed here.
double oracle_v_rk4(double u0, double v0, double kappa, double mu, double eps,
                    double T);

// v(T) for eps = 0: v0 * exp(-int_0^T u dt).
double limit_v_closed_form(double u0, double v0, double kappa, double mu,
                           double T);

struct OracleResult {
  double u = 0.0;
  double v = 0.0;
};

// Endpoint (u(T), v(T)) of the spatially-uniform system for params p.
OracleResult ode_oracle(double u0, double v0, const ModelParams& p, double T);

// ---- sweeps ----------------------------------------------------------------

struct SweepRow {
  double axis_value = 0.0;
  std::string norm_name;
  double difference = 0.0;
  double fitted_order = 0.0;  // least-squares slope, NaN if undefined
  bool ok = true;
};

struct SweepResult {
  std::string axis;  // "eps", "h" or "dt"
  std::vector<double> samples;
  std::vector<SweepRow> rows;
  std::vector<std::string> failures;  // diagnostics of failed runs
};

// Least-squares slope of log(e) versus log(x); NaN when fewer than two
// usable (positive) points exist.
double fit_order(const std::vector<double>& x, const std::vector<double>& e);

// Runs the same initial data for each eps (>= 3 values, strictly decreasing)
// with one shared fixed dt (the smallest initially admissible dt over the
// sweep) and reports Cauchy differences of consecutive runs:
// u in L1(Omega x (0,T)), v in L2(Omega x (0,T)). Rows are labeled by the
// smaller eps of each pair.
SweepResult epsilon_sweep(const Field& u0, const Field& v0, ModelParams p,
                          const Grid& g, const StepConfig& c,
                          const std::vector<double>& eps_list);

using InitialSampler = std::function<std::pair<Field, Field>(const Grid&)>;
using ExactFinal = std::function<std::pair<Field, Field>(const Grid&)>;

struct RefinementSpec {
  int levels = 3;    // >= 3
  int dt_power = 1;  // dt scales with 2^(-level*dt_power); 2 for dt ~ h^2
  double dt0 = 0.0;  // 0 => admissible dt on the coarsest level
  std::string axis = "h";
};

// Levels l = 0..levels-1 refine the base grid per axis by 2^l; dt refines by
// 2^(l*dt_power). Final-time L2 errors per level are taken against `exact`
// when given, against the ODE oracle when the initial data is uniform, and
// against the restricted finest level otherwise.
SweepResult refinement_study(const InitialSampler& initial, const ModelParams& p,
                             const Grid& g0, const StepConfig& c,
                             const RefinementSpec& spec,
                             const ExactFinal& exact = nullptr);

// Shared-thread-pool map used by the sweep drivers; worker count from the
// CHEMSIM_WORKERS environment variable (default: hardware concurrency).
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace chemsim
