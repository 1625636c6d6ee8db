#pragma once

#include "chemsim/grid.hpp"

namespace chemsim {

// Parameters of the regularized chemotaxis-consumption system
//   u_t = lap(u) - chi div( u/((1+eps u) v) grad v ) + kappa u - mu u^2
//   v_t = lap(v) - u v / ((1+eps u)(1+eps v))
// with zero-flux boundaries.
struct ModelParams {
  double chi = 0.0;    // sensitivity, >= 0
  double kappa = 0.0;  // growth rate, >= 0
  double mu = 1.0;     // damping, > 0
  double eps = 1.0;    // regularization, > 0
  double t_end = 1.0;  // horizon, >= 0

  // Throws std::invalid_argument naming the violated hypothesis.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

struct State {
  Field u;
  Field v;
  double t = 0.0;
};

// kappa*u - mu*u^2
double logistic_reaction(double u, const ModelParams& p);

// u*v / ((1+eps*u)(1+eps*v)); bounded by min(u*v, 1/eps^2) for u,v >= 0.
double consumption(double u, double v, const ModelParams& p);

// Face flux of the chemotactic transport term:
//   F = chi * s_up * (grad v)_face / vbar
// with s = u/(1+eps*u) taken from the donor (upwind) cell and vbar the
// harmonic mean of the two adjacent v values. Boundary faces carry zero.
// Throws solver_error if an adjacent v is not positive.
FaceField chemotactic_flux(const State& s, const ModelParams& p, const Grid& g);

// Face transport velocity w = chi * (grad v)_face / ((1+eps*u_up) * vbar),
// i.e. F = w * u_up. Used for the CFL bound.
FaceField face_velocities(const State& s, const ModelParams& p, const Grid& g);

}  // namespace chemsim
