#include "chemsim/config.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "chemsim/errors.hpp"
#include "chemsim/numfmt.hpp"

namespace chemsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
  throw config_error("config line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail(const std::string& msg) {
  throw config_error("config: " + msg);
}

double parse_double(const std::string& v, int line) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    fail_line(line, "expected a number, got '" + v + "'");
  }
  if (pos != v.size()) fail_line(line, "trailing characters after number in '" + v + "'");
  if (!std::isfinite(x)) fail_line(line, "number must be finite, got '" + v + "'");
  return x;
}

int parse_int(const std::string& v, int line) {
  std::size_t pos = 0;
  long x = 0;
  try {
    x = std::stol(v, &pos);
  } catch (const std::exception&) {
    fail_line(line, "expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) fail_line(line, "expected an integer, got '" + v + "'");
  if (x < -1000000000L || x > 1000000000L) fail_line(line, "integer out of range: '" + v + "'");
  return static_cast<int>(x);
}

std::vector<double> parse_double_list(const std::string& v, int line) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    auto comma = v.find(',', start);
    std::string piece = trim(comma == std::string::npos ? v.substr(start)
                                                        : v.substr(start, comma - start));
    if (piece.empty()) fail_line(line, "empty entry in number list");
    out.push_back(parse_double(piece, line));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

ProfileSpec parse_profile(const std::string& v, int line) {
  auto open = v.find('(');
  if (open == std::string::npos || v.empty() || v.back() != ')')
    fail_line(line, "profile must look like name(arg, ...), got '" + v + "'");
  ProfileSpec p;
  p.kind = trim(v.substr(0, open));
  if (p.kind != "constant" && p.kind != "gaussian_bump" && p.kind != "cosine")
    fail_line(line, "unknown profile '" + p.kind +
                        "' (known: constant, gaussian_bump, cosine)");
  std::string inner = trim(v.substr(open + 1, v.size() - open - 2));
  if (inner.empty()) fail_line(line, "profile '" + p.kind + "' needs arguments");
  p.args = parse_double_list(inner, line);
  return p;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"grid", {"dim", "x_min", "x_max", "nx", "y_min", "y_max", "ny"}},
      {"params", {"chi", "kappa", "mu", "eps", "t_end"}},
      {"stepping", {"dt_max", "cfl_safety", "snapshot_every"}},
      {"initial", {"u", "v"}},
      {"output", {"dir"}},
      {"weakform", {"spatial_modes", "tol_factor"}},
      {"sweep", {"eps_list", "refine_levels", "refine_dt_power", "refine_dt0"}},
      {"oracle", {"rtol"}},
  };
  return k;
}

// Closed-form admissibility of a profile for the given role ("u" needs a
// nonnegative field, "v" a strictly positive one). Grid-independent, so a
// finer grid can never expose a sign violation the check missed.
void validate_profile(const ProfileSpec& p, int dim, const std::string& role) {
  const std::string who = "initial " + role + ": ";
  auto nargs = p.args.size();
  if (p.kind == "constant") {
    if (nargs != 1) fail(who + "constant takes exactly 1 argument (value)");
    double c = p.args[0];
    if (role == "u" && !(c >= 0.0))
      fail(who + "constant(" + g17(c) + ") violates u0 >= 0 (initial density must be nonnegative)");
    if (role == "v" && !(c > 0.0))
      fail(who + "constant(" + g17(c) + ") violates v0 > 0 (initial signal must be strictly positive)");
  } else if (p.kind == "gaussian_bump") {
    std::size_t want = static_cast<std::size_t>(dim) + 2;
    if (nargs != want && nargs != want + 1)
      fail(who + "gaussian_bump takes center per axis, width, amplitude and an optional floor (" +
           std::to_string(want) + " or " + std::to_string(want + 1) + " arguments for dim = " +
           std::to_string(dim) + ")");
    double width = p.args[dim];
    double amp = p.args[dim + 1];
    double floor = nargs == want + 1 ? p.args[want] : 0.0;
    if (!(width > 0.0)) fail(who + "gaussian_bump requires width > 0");
    if (!(amp >= 0.0))
      fail(who + "gaussian_bump requires amplitude >= 0 (negative bumps can undercut the floor)");
    if (role == "u" && !(floor >= 0.0))
      fail(who + "gaussian_bump floor violates u0 >= 0 (initial density must be nonnegative)");
    if (role == "v" && !(floor > 0.0))
      fail(who + "gaussian_bump floor violates v0 > 0 (initial signal must be strictly positive)");
  } else if (p.kind == "cosine") {
    if (nargs != 3) fail(who + "cosine takes exactly 3 arguments (mode, amplitude, offset)");
    double k = p.args[0];
    double amp = p.args[1];
    double off = p.args[2];
    if (!(k >= 1.0) || k != std::floor(k))
      fail(who + "cosine mode must be a positive integer");
    if (role == "u" && !(off - std::abs(amp) >= 0.0))
      fail(who + "cosine offset must dominate |amplitude| (initial density must be nonnegative)");
    if (role == "v" && !(off - std::abs(amp) > 0.0))
      fail(who + "cosine offset must strictly dominate |amplitude| (initial signal must be strictly positive)");
  } else {
    fail(who + "unknown profile '" + p.kind + "'");
  }
}

std::string serialize_profile(const ProfileSpec& p) {
  std::string s = p.kind + "(";
  for (std::size_t i = 0; i < p.args.size(); ++i) {
    if (i) s += ", ";
    s += g17(p.args[i]);
  }
  return s + ")";
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  bool saw_nx = false, saw_ny = false, saw_u = false, saw_v = false;
  bool saw_chi = false, saw_kappa = false, saw_mu = false, saw_eps = false, saw_t_end = false;

  std::string section;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail_line(line, "unterminated section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (!known_keys().count(section))
        fail_line(line, "unknown section [" + section + "]");
      continue;
    }

    auto eq = s.find('=');
    if (eq == std::string::npos) fail_line(line, "expected key = value, got '" + s + "'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (section.empty()) fail_line(line, "key '" + key + "' appears before any [section]");
    if (key.empty()) fail_line(line, "empty key");
    if (value.empty()) fail_line(line, "empty value for key '" + key + "'");
    if (!known_keys().at(section).count(key))
      fail_line(line, "unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(section + "/" + key).second)
      fail_line(line, "duplicate key '" + key + "' in [" + section + "]");

    if (section == "grid") {
      if (key == "dim") cfg.dim = parse_int(value, line);
      else if (key == "x_min") cfg.x_min = parse_double(value, line);
      else if (key == "x_max") cfg.x_max = parse_double(value, line);
      else if (key == "nx") { cfg.nx = parse_int(value, line); saw_nx = true; }
      else if (key == "y_min") cfg.y_min = parse_double(value, line);
      else if (key == "y_max") cfg.y_max = parse_double(value, line);
      else { cfg.ny = parse_int(value, line); saw_ny = true; }
    } else if (section == "params") {
      if (key == "chi") { cfg.params.chi = parse_double(value, line); saw_chi = true; }
      else if (key == "kappa") { cfg.params.kappa = parse_double(value, line); saw_kappa = true; }
      else if (key == "mu") { cfg.params.mu = parse_double(value, line); saw_mu = true; }
      else if (key == "eps") { cfg.params.eps = parse_double(value, line); saw_eps = true; }
      else { cfg.params.t_end = parse_double(value, line); saw_t_end = true; }
    } else if (section == "stepping") {
      if (key == "dt_max") cfg.dt_max = parse_double(value, line);
      else if (key == "cfl_safety") cfg.cfl_safety = parse_double(value, line);
      else cfg.snapshot_every = parse_double(value, line);
    } else if (section == "initial") {
      if (key == "u") { cfg.u0 = parse_profile(value, line); saw_u = true; }
      else { cfg.v0 = parse_profile(value, line); saw_v = true; }
    } else if (section == "output") {
      cfg.output_dir = value;
    } else if (section == "weakform") {
      if (key == "spatial_modes") cfg.spatial_modes = parse_int(value, line);
      else cfg.tol_factor = parse_double(value, line);
    } else if (section == "sweep") {
      if (key == "eps_list") cfg.eps_list = parse_double_list(value, line);
      else if (key == "refine_levels") cfg.refine_levels = parse_int(value, line);
      else if (key == "refine_dt_power") cfg.refine_dt_power = parse_int(value, line);
      else cfg.refine_dt0 = parse_double(value, line);
    } else {  // oracle
      cfg.oracle_rtol = parse_double(value, line);
    }
  }

  // Required keys.
  if (!saw_nx) fail("missing required key 'nx' in [grid]");
  if (!saw_chi) fail("missing required key 'chi' in [params]");
  if (!saw_kappa) fail("missing required key 'kappa' in [params]");
  if (!saw_mu) fail("missing required key 'mu' in [params]");
  if (!saw_eps) fail("missing required key 'eps' in [params]");
  if (!saw_t_end) fail("missing required key 't_end' in [params]");
  if (!saw_u) fail("missing required key 'u' in [initial]");
  if (!saw_v) fail("missing required key 'v' in [initial]");

  // Grid geometry.
  if (cfg.dim != 1 && cfg.dim != 2) fail("[grid] dim must be 1 or 2");
  if (cfg.nx < 4) fail("[grid] nx must be >= 4");
  if (!(cfg.x_min < cfg.x_max)) fail("[grid] requires x_min < x_max");
  if (cfg.dim == 2) {
    if (!saw_ny) fail("missing required key 'ny' in [grid] (dim = 2)");
    if (cfg.ny < 4) fail("[grid] ny must be >= 4");
    if (!(cfg.y_min < cfg.y_max)) fail("[grid] requires y_min < y_max");
  } else if (saw_ny) {
    fail("[grid] ny requires dim = 2");
  }

  // Model hypotheses (chi >= 0, kappa >= 0, mu > 0, eps > 0), reported with
  // the violated condition named.
  try {
    cfg.params.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  if (!(cfg.params.t_end > 0.0)) fail("requires t_end > 0 for a run");

  // Stepping. dt_max == 0 is the "derive from t_end" sentinel.
  if (cfg.dt_max != 0.0 && !(cfg.dt_max > 0.0)) fail("[stepping] dt_max must be > 0");
  if (!(cfg.cfl_safety > 0.0) || cfg.cfl_safety > 1.0)
    fail("[stepping] requires 0 < cfl_safety <= 1");
  if (cfg.snapshot_every < 0.0) fail("[stepping] requires snapshot_every >= 0");

  // Weak-form audit.
  if (cfg.spatial_modes < 1 || cfg.spatial_modes > 8)
    fail("[weakform] spatial_modes must be between 1 and 8");
  if (!(cfg.tol_factor > 0.0)) fail("[weakform] tol_factor must be > 0");

  // Sweeps.
  if (cfg.eps_list.empty()) fail("[sweep] eps_list must not be empty");
  for (double e : cfg.eps_list)
    if (!(e > 0.0)) fail("[sweep] eps_list entries must be > 0");
  if (cfg.refine_levels < 3) fail("[sweep] refine_levels must be >= 3");
  if (cfg.refine_dt_power < 1) fail("[sweep] refine_dt_power must be >= 1");
  if (cfg.refine_dt0 < 0.0) fail("[sweep] refine_dt0 must be >= 0 (0 = derive automatically)");

  // Oracle.
  if (!(cfg.oracle_rtol > 0.0)) fail("[oracle] rtol must be > 0");

  // Initial profiles (closed-form positivity).
  validate_profile(cfg.u0, cfg.dim, "u");
  validate_profile(cfg.v0, cfg.dim, "v");

  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[grid]\n";
  out << "dim = " << cfg.dim << "\n";
  out << "x_min = " << g17(cfg.x_min) << "\n";
  out << "x_max = " << g17(cfg.x_max) << "\n";
  out << "nx = " << cfg.nx << "\n";
  if (cfg.dim == 2) {
    out << "y_min = " << g17(cfg.y_min) << "\n";
    out << "y_max = " << g17(cfg.y_max) << "\n";
    out << "ny = " << cfg.ny << "\n";
  }
  out << "\n[params]\n";
  out << "chi = " << g17(cfg.params.chi) << "\n";
  out << "kappa = " << g17(cfg.params.kappa) << "\n";
  out << "mu = " << g17(cfg.params.mu) << "\n";
  out << "eps = " << g17(cfg.params.eps) << "\n";
  out << "t_end = " << g17(cfg.params.t_end) << "\n";
  out << "\n[stepping]\n";
  if (cfg.dt_max > 0.0) out << "dt_max = " << g17(cfg.dt_max) << "\n";
  out << "cfl_safety = " << g17(cfg.cfl_safety) << "\n";
  out << "snapshot_every = " << g17(cfg.snapshot_every) << "\n";
  out << "\n[initial]\n";
  out << "u = " << serialize_profile(cfg.u0) << "\n";
  out << "v = " << serialize_profile(cfg.v0) << "\n";
  out << "\n[output]\n";
  out << "dir = " << cfg.output_dir << "\n";
  out << "\n[weakform]\n";
  out << "spatial_modes = " << cfg.spatial_modes << "\n";
  out << "tol_factor = " << g17(cfg.tol_factor) << "\n";
  out << "\n[sweep]\n";
  out << "eps_list = ";
  for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
    if (i) out << ", ";
    out << g17(cfg.eps_list[i]);
  }
  out << "\n";
  out << "refine_levels = " << cfg.refine_levels << "\n";
  out << "refine_dt_power = " << cfg.refine_dt_power << "\n";
  out << "refine_dt0 = " << g17(cfg.refine_dt0) << "\n";
  out << "\n[oracle]\n";
  out << "rtol = " << g17(cfg.oracle_rtol) << "\n";
  return out.str();
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("config: cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Grid grid_from_config(const RunConfig& cfg) {
  if (cfg.dim == 1) return build_grid(cfg.x_min, cfg.x_max, cfg.nx);
  return build_grid(2, {cfg.x_min, cfg.y_min}, {cfg.x_max, cfg.y_max}, {cfg.nx, cfg.ny});
}

StepConfig step_config_from(const RunConfig& cfg) {
  StepConfig c;
  c.dt_max = cfg.dt_max > 0.0 ? cfg.dt_max : cfg.params.t_end / 100.0;
  c.cfl_safety = cfg.cfl_safety;
  c.snapshot_every = cfg.snapshot_every;
  c.validate();
  return c;
}

Field build_profile(const ProfileSpec& spec, const Grid& g, const std::string& role) {
  if (role != "u" && role != "v")
    throw std::invalid_argument("build_profile: role must be \"u\" or \"v\"");
  validate_profile(spec, g.dim, role);

  Field f(static_cast<std::size_t>(g.cells()), 0.0);
  auto for_each_center = [&](auto&& body) {
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int ix = 0; ix < g.n[0]; ++ix)
        body(g.index(ix, iy), g.center(0, ix), g.dim == 2 ? g.center(1, iy) : 0.0);
  };

  if (spec.kind == "constant") {
    const double c = spec.args[0];
    for (auto& x : f) x = c;
  } else if (spec.kind == "gaussian_bump") {
    const int d = g.dim;
    const double width = spec.args[d];
    const double amp = spec.args[d + 1];
    const double floor = spec.args.size() == static_cast<std::size_t>(d) + 3
                             ? spec.args[d + 2]
                             : 0.0;
    for_each_center([&](int i, double x, double y) {
      double r2 = (x - spec.args[0]) * (x - spec.args[0]);
      if (d == 2) r2 += (y - spec.args[1]) * (y - spec.args[1]);
      f[i] = floor + amp * std::exp(-r2 / (2.0 * width * width));
    });
  } else {  // cosine
    const double k = spec.args[0];
    const double amp = spec.args[1];
    const double off = spec.args[2];
    for_each_center([&](int i, double x, double y) {
      double w = std::cos(k * kPi * (x - g.lo[0]) / g.length(0));
      if (g.dim == 2) w *= std::cos(k * kPi * (y - g.lo[1]) / g.length(1));
      f[i] = off + amp * w;
    });
  }

  // Defense in depth: the closed-form check above makes these unreachable.
  for (double x : f) {
    if (role == "u" && !(x >= 0.0))
      fail("initial u: sampled profile dips below 0 (initial density must be nonnegative)");
    if (role == "v" && !(x > 0.0))
      fail("initial v: sampled profile reaches 0 (initial signal must be strictly positive)");
  }
  return f;
}

std::pair<Field, Field> build_initial_data(const RunConfig& cfg, const Grid& g) {
  return {build_profile(cfg.u0, g, "u"), build_profile(cfg.v0, g, "v")};
}

}  // namespace chemsim
