#include "chemsim/grid.hpp"

#include <stdexcept>
#include <string>

namespace chemsim {

Grid build_grid(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
                std::array<int, 2> n) {
  if (dim < 1 || dim > 2)
    throw std::invalid_argument("build_grid: dim must be 1 or 2, got " +
                                std::to_string(dim));
  Grid g;
  g.dim = dim;
  g.lo = lo;
  g.hi = hi;
  g.n = n;
  if (dim == 1) {
    g.n[1] = 1;
    g.hi[1] = lo[1];
  }
  g.cell_volume = 1.0;
  for (int a = 0; a < dim; ++a) {
    if (!(hi[a] > lo[a]))
      throw std::invalid_argument("build_grid: extent on axis " +
                                  std::to_string(a) + " must be positive");
    if (n[a] < 4)
      throw std::invalid_argument("build_grid: need at least 4 cells per axis, got " +
                                  std::to_string(n[a]));
    g.h[a] = (hi[a] - lo[a]) / n[a];
    g.cell_volume *= g.h[a];
  }
  g.domain_measure = g.cell_volume * g.cells();
  return g;
}

Grid build_grid(double lo, double hi, int n) {
  return build_grid(1, {lo, 0.0}, {hi, 0.0}, {n, 1});
}

static void check_size(const Field& f, const Grid& g, const char* op) {
  if (static_cast<int>(f.size()) != g.cells())
    throw std::invalid_argument(std::string(op) + ": field size " +
                                std::to_string(f.size()) + " does not match grid (" +
                                std::to_string(g.cells()) + " cells)");
}

FaceField make_face_field(const Grid& g) {
  FaceField ff;
  ff.axis[0].assign(static_cast<size_t>(g.n[0] + 1) * g.n[1], 0.0);
  if (g.dim == 2) ff.axis[1].assign(static_cast<size_t>(g.n[0]) * (g.n[1] + 1), 0.0);
  return ff;
}

FaceField face_gradient(const Field& f, const Grid& g) {
  check_size(f, g, "face_gradient");
  FaceField ff = make_face_field(g);
  const int nx = g.n[0], ny = g.n[1];
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 1; ix < nx; ++ix)
      ff.axis[0][iy * (nx + 1) + ix] =
          (f[g.index(ix, iy)] - f[g.index(ix - 1, iy)]) / g.h[0];
  if (g.dim == 2)
    for (int iy = 1; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
        ff.axis[1][iy * nx + ix] =
            (f[g.index(ix, iy)] - f[g.index(ix, iy - 1)]) / g.h[1];
  return ff;
}

Field divergence(const FaceField& flux, const Grid& g) {
  const int nx = g.n[0], ny = g.n[1];
  if (flux.axis[0].size() != static_cast<size_t>(nx + 1) * ny)
    throw std::invalid_argument("divergence: axis-0 face count mismatch");
  if (g.dim == 2 && flux.axis[1].size() != static_cast<size_t>(nx) * (ny + 1))
    throw std::invalid_argument("divergence: axis-1 face count mismatch");
  Field out(static_cast<size_t>(g.cells()), 0.0);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      out[g.index(ix, iy)] =
          (flux.axis[0][iy * (nx + 1) + ix + 1] - flux.axis[0][iy * (nx + 1) + ix]) /
          g.h[0];
  if (g.dim == 2)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
        out[g.index(ix, iy)] +=
            (flux.axis[1][(iy + 1) * nx + ix] - flux.axis[1][iy * nx + ix]) / g.h[1];
  return out;
}

Field laplacian(const Field& f, const Grid& g) {
  check_size(f, g, "laplacian");
  return divergence(face_gradient(f, g), g);
}

double integrate(const Field& f, const Grid& g) {
  check_size(f, g, "integrate");
  double s = 0.0;
  for (double v : f) s += v;
  return g.cell_volume * s;
}

double grad_squared_integral(const Field& f, const Grid& g) {
  FaceField ff = face_gradient(f, g);
  double s = 0.0;
  for (int a = 0; a < g.dim; ++a)
    for (double v : ff.axis[a]) s += v * v;
  return g.cell_volume * s;
}

std::array<Field, 2> gradient_at_centers(const Field& f, const Grid& g) {
  FaceField ff = face_gradient(f, g);
  std::array<Field, 2> out;
  const int nx = g.n[0], ny = g.n[1];
  out[0].assign(static_cast<size_t>(g.cells()), 0.0);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      out[0][g.index(ix, iy)] = 0.5 * (ff.axis[0][iy * (nx + 1) + ix] +
                                       ff.axis[0][iy * (nx + 1) + ix + 1]);
  if (g.dim == 2) {
    out[1].assign(static_cast<size_t>(g.cells()), 0.0);
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
        out[1][g.index(ix, iy)] =
            0.5 * (ff.axis[1][iy * nx + ix] + ff.axis[1][(iy + 1) * nx + ix]);
  }
  return out;
}

}  // namespace chemsim
