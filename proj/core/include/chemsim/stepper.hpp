#pragma once

#include <limits>
#include <vector>

#include "chemsim/estimates.hpp"
#include "chemsim/grid.hpp"
#include "chemsim/model.hpp"

namespace chemsim {

struct StepConfig {
  double dt_max = 1e-2;
  // Donor-cell positivity is guaranteed for cfl_safety <= 1/(2*dim); keep a
  // little slack below that in 2D (e.g. 0.2).
  double cfl_safety = 0.25;
  double snapshot_every = 0.0;  // 0 => t_end/200

  void validate() const;
};

struct StepStats {
  long steps = 0;
  double dt_min = std::numeric_limits<double>::infinity();
  double dt_max_used = 0.0;
  double min_u = std::numeric_limits<double>::infinity();
  double min_v = std::numeric_limits<double>::infinity();
  // min over steps of min(v) / (inf v0 * exp(-t/eps)); >= 1 - 1e-8 expected
  double min_lower_bound_ratio = std::numeric_limits<double>::infinity();
  // max over steps of (||v||_inf after - ||v||_inf before); <= 1e-12 expected
  double max_supnorm_growth = -std::numeric_limits<double>::infinity();
};

struct Trajectory {
  Grid grid;
  ModelParams params;
  StepConfig config;
  std::vector<State> snapshots;  // strictly increasing times; [0] is t = 0
  EstimateLedger ledger;
  StepStats stats;
};

// cfl_safety * min over faces of h/(|w| + tiny) with w = face_velocities,
// additionally capped by dt_max and by the remaining time t_end - s.t.
double admissible_dt(const State& s, const ModelParams& p, const Grid& g,
                     const StepConfig& c);

// One splitting step of size dt (caller keeps dt <= admissible_dt):
//   1. explicit donor-cell chemotactic transport of u,
//   2. exact pointwise reactions
//        u <- u (1 + dt kappa) / (1 + dt mu u)
//        v <- v / (1 + dt u/((1+eps u)(1+eps v)))   (pre-update u, v),
//   3. backward Euler diffusion (I - dt lap) f = f for u and v
//      (tridiagonal per axis; ADI sweep in 2D).
// Throws solver_error if the output has u < 0, v <= 0 or non-finite entries.
State step(const State& s, const ModelParams& p, const Grid& g, double dt);

// Integrate from t=0 to t_end with adaptive CFL-limited steps, feeding every
// accepted step to the estimate ledger and storing snapshots every
// snapshot_every time units (plus t=0 and t_end). Aborts with solver_error
// if the admissible dt collapses below 1e-12 * t_end.
Trajectory run(const Field& u0, const Field& v0, const ModelParams& p,
               const Grid& g, const StepConfig& c);

// Same loop with a constant dt so a family of runs (epsilon sweeps,
// refinement studies) shares one stepping policy.
Trajectory run_fixed_dt(const Field& u0, const Field& v0, const ModelParams& p,
                        const Grid& g, const StepConfig& c, double dt);

}  // namespace chemsim
