#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chemsim/grid.hpp"
#include "chemsim/model.hpp"
#include "chemsim/stepper.hpp"

namespace chemsim {

// A named analytic initial-data profile with raw numeric arguments:
//   constant(c)
//   gaussian_bump(center..., width, amplitude[, floor])   (one center per axis)
//   cosine(mode, amplitude, offset)
struct ProfileSpec {
  std::string kind;
  std::vector<double> args;

  bool operator==(const ProfileSpec&) const = default;
};

// Full run description in a line-oriented `[section]` / `key = value` format.
// Unset optional values keep their documented defaults; 0 marks "derive from
// t_end" for dt_max (t_end/100) and snapshot_every (t_end/200).
struct RunConfig {
  // [grid]
  int dim = 1;
  double x_min = 0.0, x_max = 1.0;
  int nx = 0;
  double y_min = 0.0, y_max = 1.0;
  int ny = 0;

  // [params]
  ModelParams params;

  // [stepping]
  double dt_max = 0.0;
  double cfl_safety = 0.25;
  double snapshot_every = 0.0;

  // [initial]
  ProfileSpec u0, v0;

  // [output]
  std::string output_dir = "out";

  // [weakform]
  int spatial_modes = 2;
  double tol_factor = 10.0;

  // [sweep]
  std::vector<double> eps_list{1.0, 0.5, 0.25, 0.125, 0.0625};
  int refine_levels = 3;
  int refine_dt_power = 1;
  double refine_dt0 = 0.0;

  // [oracle]
  double oracle_rtol = 1e-3;

  bool operator==(const RunConfig&) const = default;
};

// Parses and validates. Throws config_error with the offending line number
// for syntax problems (missing '=', unknown section/key/profile, duplicate
// key, bad number) and with the violated hypothesis named for semantic
// problems (mu <= 0, negative chi or kappa, nonpositive v0 floor, ...).
RunConfig parse_config(const std::string& text);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

// Reads the file and parses it; io_error if unreadable.
RunConfig load_config_file(const std::string& path);

Grid grid_from_config(const RunConfig& cfg);
StepConfig step_config_from(const RunConfig& cfg);

// Samples one profile at cell centers. `role` is "u" or "v": u requires a
// nonnegative profile, v a strictly positive one (checked in closed form per
// profile family, then re-verified on the sampled field).
Field build_profile(const ProfileSpec& spec, const Grid& g, const std::string& role);

// Both initial fields for the configured grid.
std::pair<Field, Field> build_initial_data(const RunConfig& cfg, const Grid& g);

}  // namespace chemsim
