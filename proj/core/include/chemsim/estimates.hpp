#pragma once

#include <string>
#include <vector>

#include "chemsim/grid.hpp"
#include "chemsim/model.hpp"

namespace chemsim {

struct Trajectory;  // stepper.hpp

// Closed-form a priori bound constants over the horizon [0, T], computed from
// the initial data, the parameters and the domain. All finite and
// nonnegative; requires mu > 0 and T > 0.
struct BoundConstants {
  double T = 0.0;
  double C1 = 0.0;   // sup_t ||u||_L1
  double C2 = 0.0;   // integral of u^2 over space-time
  double C3 = 0.0;   // integral of |grad log v|^2 over space-time
  double C4 = 0.0;   // integral of |grad log(u+1)|^2 over space-time
  double C5 = 0.0;   // integral of |grad u| over space-time
  double C6 = 0.0;   // combined space-time mass/variation bound (C1*T + C5)
  double C7 = 0.0;   // sup_t ||grad v||_L2
  double C8 = 0.0;   // ||lap v||_L2 over space-time
  double C9 = 0.0;   // ||v_t||_L2 over space-time
  double C10 = 0.0;  // sup_t ||log v||_L1
  double C11 = 0.0;  // ||log v||_{L2((0,T); W^{1,2})}
  double CP = 0.0;   // Poincare constant 1/lambda_1 of the Neumann Laplacian
};

BoundConstants bounds_from_data(const Field& u0, const Field& v0,
                                const ModelParams& p, const Grid& g, double T);

// Instantaneous spatial integrals of one state.
struct InstantRates {
  double int_u = 0.0;
  double int_u_sq = 0.0;
  double grad_log_v_sq = 0.0;
  double grad_log_u1_sq = 0.0;
  double grad_u_l1 = 0.0;  // center-averaged Euclidean gradient magnitude
  double lap_v_sq = 0.0;
  double log_v_sq = 0.0;
  double consumption = 0.0;       // integral of u*v/((1+eps u)(1+eps v))
  double consumption_rate = 0.0;  // integral of u/((1+eps u)(1+eps v))
  double grad_v_sq = 0.0;
  double log_v_l1 = 0.0;
  double v_sup = 0.0;
};

InstantRates compute_rates(const State& s, const ModelParams& p, const Grid& g);

// One serializable row of the running ledger (written per snapshot).
struct LedgerRow {
  double t = 0.0;
  double int_u = 0.0, grad_v_sq = 0.0, log_v_l1 = 0.0, v_sup = 0.0;
  double acc_u_sq = 0.0, acc_grad_log_v_sq = 0.0, acc_grad_log_u1_sq = 0.0;
  double acc_grad_u_l1 = 0.0, acc_lap_v_sq = 0.0, acc_v_t_sq = 0.0;
  double acc_log_v_sq = 0.0, acc_consumption = 0.0, acc_consumption_rate = 0.0;
};

// Running space-time integrals of a trajectory (trapezoid in time per step)
// plus the bound constants they are compared against.
struct EstimateLedger {
  Grid grid;
  ModelParams params;
  BoundConstants bounds;

  double t = 0.0;
  long steps = 0;
  double max_dt = 0.0;

  // accumulators (nondecreasing)
  double acc_u_sq = 0.0;
  double acc_grad_log_v_sq = 0.0;
  double acc_grad_log_u1_sq = 0.0;
  double acc_grad_u_l1 = 0.0;
  double acc_lap_v_sq = 0.0;
  double acc_v_t_sq = 0.0;
  double acc_log_v_sq = 0.0;
  double acc_consumption = 0.0;
  double acc_consumption_rate = 0.0;

  // instantaneous values at time t, plus running suprema over the evolved
  // states (t > 0).  The initial instant satisfies each sup-in-time bound by
  // construction -- every constant dominates its own initial-data term -- so
  // including it could never flag a violation; excluding it keeps the
  // reported margin a measure of how far the *dynamics* stay from the bound.
  double int_u = 0.0, grad_v_sq = 0.0, log_v_l1 = 0.0, v_sup = 0.0;
  double max_int_u = 0.0, max_grad_v_sq = 0.0, max_log_v_l1 = 0.0;

  bool initialized = false;
  InstantRates last;  // rates at time t (trapezoid partner of the next step)

  std::vector<LedgerRow> rows;  // captured at snapshot times
};

EstimateLedger make_ledger(const Field& u0, const Field& v0,
                           const ModelParams& p, const Grid& g, double T);

LedgerRow capture_row(const EstimateLedger& ledger);

// Trapezoid-in-time update over one accepted step. dt == 0 leaves the ledger
// unchanged. `before` must be the state the ledger currently sits at.
void accumulate(EstimateLedger& ledger, const State& before, const State& after,
                double dt, const Grid& g, const ModelParams& p);

struct CheckRow {
  std::string lemma_id;
  double value = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - value
  bool pass = false;    // value <= bound * (1 + tol)
  double tol = 0.0;
};

// value <= bound * (1 + tol)
bool check_pass(double value, double bound, double tol);

// Compares every tracked estimate against its bound with relative tolerance
// 1e-6 + 10*(h + max accepted dt). Requires t <= bounds.T.
std::vector<CheckRow> check(const EstimateLedger& ledger,
                            const BoundConstants& bounds, double t);

// Margin of the accumulated consumption-rate integral against C1*T.
double consumption_vs_mass_check(const EstimateLedger& ledger);

// Residual of the discrete log-mass balance over [0, T]:
//   int_0^T int |grad log v|^2
//     - ( int log v(T) - int log v(0) + int_0^T int u/((1+eps u)(1+eps v)) ).
// Uses the trajectory's ledger accumulators and its first/last snapshots.
double log_mass_identity_residual(const Trajectory& traj, const ModelParams& p,
                                  const Grid& g, double T);

}  // namespace chemsim
