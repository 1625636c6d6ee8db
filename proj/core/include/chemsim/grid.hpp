#pragma once

#include <array>
#include <vector>

namespace chemsim {

using Field = std::vector<double>;

// Uniform cell-centered grid on an interval (1D) or axis-aligned rectangle
// (2D). Homogeneous Neumann boundaries are realized by mirror ghost cells,
// i.e. every boundary face carries exactly zero flux.
//
// Cell (ix, iy) is stored at index ix + n[0]*iy (x fastest).
struct Grid {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 0.0};
  std::array<int, 2> n{0, 1};  // cells per axis; n[1] == 1 in 1D
  std::array<double, 2> h{0.0, 0.0};
  double cell_volume = 0.0;
  // Defined as cell_volume * cells() so the identity holds exactly.
  double domain_measure = 0.0;

  int cells() const { return n[0] * n[1]; }
  int index(int ix, int iy = 0) const { return ix + n[0] * iy; }
  double center(int axis, int i) const { return lo[axis] + (i + 0.5) * h[axis]; }
  double length(int axis) const { return hi[axis] - lo[axis]; }
  double max_h() const { return dim == 2 ? (h[0] > h[1] ? h[0] : h[1]) : h[0]; }
};

// Throws std::invalid_argument unless 1 <= dim <= 2, hi > lo per axis and
// n >= 4 cells per axis.
Grid build_grid(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
                std::array<int, 2> n);
Grid build_grid(double lo, double hi, int n);  // 1D convenience

// Values attached to cell faces, boundary faces included.
// axis[0]: (n[0]+1) * n[1] values, laid out x-fastest; face (ix, iy) with
//          ix in [0, n[0]] separates cells (ix-1, iy) and (ix, iy).
// axis[1]: n[0] * (n[1]+1) values; face (ix, iy) with iy in [0, n[1]]
//          separates cells (ix, iy-1) and (ix, iy). Empty in 1D.
struct FaceField {
  std::array<std::vector<double>, 2> axis;
};

FaceField make_face_field(const Grid& g);  // zero-initialized

// Two-point face gradient (f_R - f_L)/h per interior face, zero on boundary
// faces (mirror ghosts).
FaceField face_gradient(const Field& f, const Grid& g);

// Per cell: sum over axes of (face_value_right - face_value_left)/h.
Field divergence(const FaceField& flux, const Grid& g);

// divergence(face_gradient(f)) by construction; equals the standard 3-point
// (1D) / 5-point (2D) stencil with mirror ghost cells.
Field laplacian(const Field& f, const Grid& g);

// Midpoint rule: cell_volume * sum of values.
double integrate(const Field& f, const Grid& g);

// cell_volume * sum over faces of face_gradient^2; staggered analogue of
// the Dirichlet integral of f.
double grad_squared_integral(const Field& f, const Grid& g);

// Face gradients averaged to cell centers, one component per axis
// (component [1] empty in 1D). Boundary faces contribute their zero value.
std::array<Field, 2> gradient_at_centers(const Field& f, const Grid& g);

}  // namespace chemsim
