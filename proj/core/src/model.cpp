#include "chemsim/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "chemsim/errors.hpp"

namespace chemsim {

void ModelParams::validate() const {
  if (!(chi >= 0.0)) throw std::invalid_argument("params: requires chi >= 0");
  if (!(kappa >= 0.0)) throw std::invalid_argument("params: requires kappa >= 0");
  if (!(mu > 0.0)) throw std::invalid_argument("params: requires mu > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("params: requires eps > 0");
  if (!(t_end >= 0.0)) throw std::invalid_argument("params: requires t_end >= 0");
}

double logistic_reaction(double u, const ModelParams& p) {
  return p.kappa * u - p.mu * u * u;
}

double consumption(double u, double v, const ModelParams& p) {
  return u * v / ((1.0 + p.eps * u) * (1.0 + p.eps * v));
}

namespace {

// Shared face sweep; emits either the flux F = chi*s_up*grad/vbar or the
// velocity w = chi*grad/((1+eps*u_up)*vbar).
FaceField face_sweep(const State& s, const ModelParams& p, const Grid& g,
                     bool want_velocity) {
  FaceField out = make_face_field(g);
  if (p.chi == 0.0) return out;
  const int nx = g.n[0], ny = g.n[1];
  auto emit = [&](int axis, size_t face, int cl, int cr) {
    double vl = s.v[cl], vr = s.v[cr];
    if (!(vl > 0.0) || !(vr > 0.0))
      throw solver_error("chemotactic_flux: non-positive v at a face (v_left=" +
                         std::to_string(vl) + ", v_right=" + std::to_string(vr) +
                         "); positivity invariant breached upstream");
    double grad = (vr - vl) / g.h[axis];
    if (grad == 0.0) return;
    double vbar = 2.0 * vl * vr / (vl + vr);
    double uup = grad > 0.0 ? s.u[cl] : s.u[cr];
    if (want_velocity)
      out.axis[axis][face] = p.chi * grad / ((1.0 + p.eps * uup) * vbar);
    else
      out.axis[axis][face] = p.chi * (uup / (1.0 + p.eps * uup)) * grad / vbar;
  };
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 1; ix < nx; ++ix)
      emit(0, static_cast<size_t>(iy) * (nx + 1) + ix, g.index(ix - 1, iy),
           g.index(ix, iy));
  if (g.dim == 2)
    for (int iy = 1; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
        emit(1, static_cast<size_t>(iy) * nx + ix, g.index(ix, iy - 1),
             g.index(ix, iy));
  return out;
}

}  // namespace

FaceField chemotactic_flux(const State& s, const ModelParams& p, const Grid& g) {
  return face_sweep(s, p, g, /*want_velocity=*/false);
}

FaceField face_velocities(const State& s, const ModelParams& p, const Grid& g) {
  return face_sweep(s, p, g, /*want_velocity=*/true);
}

}  // namespace chemsim
