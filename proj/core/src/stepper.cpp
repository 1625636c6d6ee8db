#include "chemsim/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "chemsim/errors.hpp"

namespace chemsim {

void StepConfig::validate() const {
  if (!(dt_max > 0.0))
    throw std::invalid_argument("stepping: requires dt_max > 0");
  if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
    throw std::invalid_argument("stepping: requires 0 < cfl_safety <= 1");
  if (snapshot_every < 0.0)
    throw std::invalid_argument("stepping: requires snapshot_every >= 0");
}

namespace {

constexpr double kTiny = 1e-300;

// CFL-limited dt before the remaining-time cap.
double cfl_dt(const State& s, const ModelParams& p, const Grid& g,
              const StepConfig& c) {
  FaceField w = face_velocities(s, p, g);
  double m = std::numeric_limits<double>::infinity();
  for (int a = 0; a < g.dim; ++a)
    for (double wv : w.axis[a])
      m = std::min(m, g.h[a] / (std::abs(wv) + kTiny));
  return std::min(c.dt_max, c.cfl_safety * m);
}

// Donor-cell transport, written as outflow-then-inflow passes so cell values
// stay nonnegative in floating point under the CFL bound.
Field advect(const State& s, const ModelParams& p, const Grid& g, double dt) {
  Field u = s.u;
  if (p.chi == 0.0) return u;
  FaceField F = chemotactic_flux(s, p, g);
  const int nx = g.n[0], ny = g.n[1];

  auto sweep = [&](bool outflow_pass) {
    auto apply = [&](int axis, double flux, int cl, int cr) {
      if (flux == 0.0) return;
      const double c = dt / g.h[axis];
      if (flux > 0.0) {  // mass moves cl -> cr
        if (outflow_pass)
          u[cl] -= c * flux;
        else
          u[cr] += c * flux;
      } else {  // mass moves cr -> cl
        if (outflow_pass)
          u[cr] += c * flux;  // flux < 0
        else
          u[cl] -= c * flux;
      }
    };
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 1; ix < nx; ++ix)
        apply(0, F.axis[0][static_cast<size_t>(iy) * (nx + 1) + ix],
              g.index(ix - 1, iy), g.index(ix, iy));
    if (g.dim == 2)
      for (int iy = 1; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
          apply(1, F.axis[1][static_cast<size_t>(iy) * nx + ix],
                g.index(ix, iy - 1), g.index(ix, iy));
  };
  sweep(true);
  sweep(false);
  return u;
}

// Solve (I - r D2) x = rhs on one line with Neumann closure (mirror ghosts):
// diagonal 1+r at the ends, 1+2r inside, off-diagonals -r. Thomas algorithm;
// the matrix is an M-matrix with unit row sums, so min/max are preserved.
void solve_line(std::vector<double>& rhs, std::vector<double>& scratch, double r) {
  const size_t n = rhs.size();
  scratch.resize(n);
  double diag0 = 1.0 + r;
  scratch[0] = -r / diag0;
  rhs[0] /= diag0;
  for (size_t i = 1; i < n; ++i) {
    double diag = (i + 1 == n ? 1.0 + r : 1.0 + 2.0 * r);
    double m = diag + r * scratch[i - 1];
    scratch[i] = -r / m;
    rhs[i] = (rhs[i] + r * rhs[i - 1]) / m;
  }
  for (size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

Field diffuse_backward_euler(const Field& f, const Grid& g, double dt) {
  const int nx = g.n[0], ny = g.n[1];
  Field out = f;
  std::vector<double> line, scratch;
  {  // axis 0 sweep
    const double r = dt / (g.h[0] * g.h[0]);
    line.resize(nx);
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) line[ix] = out[g.index(ix, iy)];
      solve_line(line, scratch, r);
      for (int ix = 0; ix < nx; ++ix) out[g.index(ix, iy)] = line[ix];
    }
  }
  if (g.dim == 2) {  // axis 1 sweep
    const double r = dt / (g.h[1] * g.h[1]);
    line.resize(ny);
    for (int ix = 0; ix < nx; ++ix) {
      for (int iy = 0; iy < ny; ++iy) line[iy] = out[g.index(ix, iy)];
      solve_line(line, scratch, r);
      for (int iy = 0; iy < ny; ++iy) out[g.index(ix, iy)] = line[iy];
    }
  }
  return out;
}

void check_output_invariants(const Field& u, const Field& v, double t) {
  for (size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i]) || !std::isfinite(v[i]))
      throw solver_error("step: non-finite value at cell " + std::to_string(i) +
                         " (t=" + std::to_string(t) + ")");
    if (u[i] < 0.0)
      throw solver_error("step: negative u=" + std::to_string(u[i]) +
                         " at cell " + std::to_string(i) +
                         " (t=" + std::to_string(t) + "); CFL bound violated?");
    if (!(v[i] > 0.0))
      throw solver_error("step: non-positive v=" + std::to_string(v[i]) +
                         " at cell " + std::to_string(i) +
                         " (t=" + std::to_string(t) + ")");
  }
}

void validate_run_inputs(const Field& u0, const Field& v0, const ModelParams& p,
                         const Grid& g, const StepConfig& c) {
  p.validate();
  c.validate();
  if (static_cast<int>(u0.size()) != g.cells() ||
      static_cast<int>(v0.size()) != g.cells())
    throw std::invalid_argument("run: field size does not match grid");
  for (double x : u0)
    if (!std::isfinite(x) || x < 0.0)
      throw std::invalid_argument("run: requires u0 >= 0 and finite");
  for (double x : v0)
    if (!std::isfinite(x) || !(x > 0.0))
      throw std::invalid_argument("run: requires v0 > 0 and finite");
}

// Shared driver; fixed_dt == 0 selects adaptive CFL stepping.
Trajectory drive(const Field& u0, const Field& v0, const ModelParams& p,
                 const Grid& g, const StepConfig& c, double fixed_dt) {
  validate_run_inputs(u0, v0, p, g, c);
  Trajectory traj;
  traj.grid = g;
  traj.params = p;
  traj.config = c;
  State state{u0, v0, 0.0};
  traj.snapshots.push_back(state);

  StepStats& st = traj.stats;
  st.min_u = *std::min_element(u0.begin(), u0.end());
  st.min_v = *std::min_element(v0.begin(), v0.end());
  const double v_floor = st.min_v;
  double v_sup_prev = *std::max_element(v0.begin(), v0.end());

  const double T = p.t_end;
  if (T == 0.0) return traj;

  traj.ledger = make_ledger(u0, v0, p, g, T);
  const double snap_every = c.snapshot_every > 0.0 ? c.snapshot_every : T / 200.0;
  double next_snap = snap_every;
  const double t_eps = 1e-12 * T;

  while (T - state.t > t_eps) {
    double dt;
    if (fixed_dt > 0.0) {
      dt = std::min(fixed_dt, T - state.t);
    } else {
      double raw = cfl_dt(state, p, g, c);
      if (raw < 1e-12 * T)
        throw solver_error("run: admissible dt collapsed to " +
                           std::to_string(raw) + " at t=" +
                           std::to_string(state.t) + " (stiffness signal)");
      dt = std::min(raw, T - state.t);
    }

    State next = step(state, p, g, dt);
    if (T - next.t <= t_eps) next.t = T;
    accumulate(traj.ledger, state, next, next.t - state.t, g, p);

    // per-step monitors
    double mn_u = next.u[0], mn_v = next.v[0], mx_v = next.v[0];
    for (size_t i = 1; i < next.u.size(); ++i) {
      mn_u = std::min(mn_u, next.u[i]);
      mn_v = std::min(mn_v, next.v[i]);
      mx_v = std::max(mx_v, next.v[i]);
    }
    st.min_u = std::min(st.min_u, mn_u);
    st.min_v = std::min(st.min_v, mn_v);
    double lower = v_floor * std::exp(-next.t / p.eps);
    double ratio = lower > 0.0 ? mn_v / lower
                               : std::numeric_limits<double>::infinity();
    st.min_lower_bound_ratio = std::min(st.min_lower_bound_ratio, ratio);
    st.max_supnorm_growth = std::max(st.max_supnorm_growth, mx_v - v_sup_prev);
    v_sup_prev = mx_v;
    st.steps += 1;
    st.dt_min = std::min(st.dt_min, dt);
    st.dt_max_used = std::max(st.dt_max_used, dt);

    state = std::move(next);

    bool is_final = T - state.t <= t_eps;
    if (is_final || state.t >= next_snap - t_eps) {
      traj.snapshots.push_back(state);
      traj.ledger.rows.push_back(capture_row(traj.ledger));
      while (next_snap <= state.t + t_eps) next_snap += snap_every;
    }
  }
  return traj;
}

}  // namespace

double admissible_dt(const State& s, const ModelParams& p, const Grid& g,
                     const StepConfig& c) {
  c.validate();
  double dt = cfl_dt(s, p, g, c);
  return std::min(dt, std::max(0.0, p.t_end - s.t));
}

State step(const State& s, const ModelParams& p, const Grid& g, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: requires dt > 0");

  // 1. explicit donor-cell transport
  Field u = advect(s, p, g, dt);

  // 2. exact pointwise reactions (pre-update values in the denominators)
  Field v(s.v.size());
  for (size_t i = 0; i < u.size(); ++i) {
    const double ui = u[i], vi = s.v[i];
    u[i] = ui * (1.0 + dt * p.kappa) / (1.0 + dt * p.mu * ui);
    v[i] = vi / (1.0 + dt * ui / ((1.0 + p.eps * ui) * (1.0 + p.eps * vi)));
  }

  // 3. implicit diffusion
  u = diffuse_backward_euler(u, g, dt);
  v = diffuse_backward_euler(v, g, dt);

  check_output_invariants(u, v, s.t + dt);
  return State{std::move(u), std::move(v), s.t + dt};
}

Trajectory run(const Field& u0, const Field& v0, const ModelParams& p,
               const Grid& g, const StepConfig& c) {
  return drive(u0, v0, p, g, c, 0.0);
}

Trajectory run_fixed_dt(const Field& u0, const Field& v0, const ModelParams& p,
                        const Grid& g, const StepConfig& c, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("run_fixed_dt: requires dt > 0");
  return drive(u0, v0, p, g, c, dt);
}

}  // namespace chemsim
