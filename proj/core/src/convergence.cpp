#include "chemsim/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>

namespace chemsim {

double logistic_exact(double u0, double kappa, double mu, double t) {
  if (u0 == 0.0) return 0.0;
  if (kappa == 0.0) return u0 / (1.0 + mu * u0 * t);
  // overflow-safe form of kappa u0 e^{kt} / (kappa + mu u0 (e^{kt}-1))
  const double em = std::exp(-kappa * t);
  return kappa * u0 / (kappa * em + mu * u0 * (1.0 - em));
}

double logistic_integral(double u0, double kappa, double mu, double T) {
  if (u0 == 0.0) return 0.0;
  if (kappa == 0.0) return std::log1p(mu * u0 * T) / mu;
  const double em = std::exp(-kappa * T);
  // (1/mu) log( (kappa + mu u0 (e^{kT}-1)) / kappa ), overflow-safe
  return (kappa * T + std::log((kappa * em + mu * u0 * (1.0 - em)) / kappa)) / mu;
}

double oracle_v_rk4(double u0, double v0, double kappa, double mu, double eps,
                    double T) {
  if (!(u0 >= 0.0)) throw std::invalid_argument("oracle: requires u0 >= 0");
  if (!(v0 > 0.0)) throw std::invalid_argument("oracle: requires v0 > 0");
  if (!(mu > 0.0)) throw std::invalid_argument("oracle: requires mu > 0");
  if (!(eps >= 0.0)) throw std::invalid_argument("oracle: requires eps >= 0");
  if (!(T >= 0.0)) throw std::invalid_argument("oracle: requires T >= 0");
  if (T == 0.0) return v0;

  const long n = 1000000;
  const double h = T / n;
  auto f = [&](double t, double v) {
    const double u = logistic_exact(u0, kappa, mu, t);
    return -u * v / ((1.0 + eps * u) * (1.0 + eps * v));
  };
  double v = v0;
  double t = 0.0;
  for (long i = 0; i < n; ++i) {
    const double k1 = f(t, v);
    const double k2 = f(t + 0.5 * h, v + 0.5 * h * k1);
    const double k3 = f(t + 0.5 * h, v + 0.5 * h * k2);
    const double k4 = f(t + h, v + h * k3);
    v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = (i + 1) * h;
  }
  return v;
}

double limit_v_closed_form(double u0, double v0, double kappa, double mu,
                           double T) {
  return v0 * std::exp(-logistic_integral(u0, kappa, mu, T));
}

OracleResult ode_oracle(double u0, double v0, const ModelParams& p, double T) {
  p.validate();
  OracleResult r;
  r.u = logistic_exact(u0, p.kappa, p.mu, T);
  r.v = oracle_v_rk4(u0, v0, p.kappa, p.mu, p.eps, T);
  return r;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CHEMSIM_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) workers = w;
  }
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double fit_order(const std::vector<double>& x, const std::vector<double>& e) {
  std::vector<double> lx, le;
  for (size_t i = 0; i < x.size() && i < e.size(); ++i)
    if (x[i] > 0.0 && e[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      le.push_back(std::log(e[i]));
    }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, me = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    me += le[i];
  }
  mx /= lx.size();
  me /= le.size();
  double num = 0, den = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (le[i] - me);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

namespace {

void require_aligned(const Trajectory& a, const Trajectory& b) {
  if (a.snapshots.size() != b.snapshots.size())
    throw std::logic_error("sweep: snapshot counts diverged between runs");
  for (size_t k = 0; k < a.snapshots.size(); ++k)
    if (a.snapshots[k].t != b.snapshots[k].t)
      throw std::logic_error("sweep: snapshot times diverged between runs");
}

Field restrict_to(const Field& fine, const Grid& gf, const Grid& gc) {
  const int fx = gf.n[0] / gc.n[0];
  const int fy = gf.dim == 2 ? gf.n[1] / gc.n[1] : 1;
  Field out(static_cast<size_t>(gc.cells()), 0.0);
  for (int iy = 0; iy < gc.n[1]; ++iy)
    for (int ix = 0; ix < gc.n[0]; ++ix) {
      double s = 0.0;
      for (int jy = 0; jy < fy; ++jy)
        for (int jx = 0; jx < fx; ++jx)
          s += fine[gf.index(ix * fx + jx, iy * fy + jy)];
      out[gc.index(ix, iy)] = s / (fx * fy);
    }
  return out;
}

double l2_diff(const Field& a, const Field& b, const Grid& g) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(g.cell_volume * s);
}

}  // namespace

SweepResult epsilon_sweep(const Field& u0, const Field& v0, ModelParams p,
                          const Grid& g, const StepConfig& c,
                          const std::vector<double>& eps_list) {
  if (eps_list.size() < 3)
    throw std::invalid_argument("epsilon_sweep: need at least 3 eps values");
  for (size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0))
      throw std::invalid_argument("epsilon_sweep: requires eps > 0");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("epsilon_sweep: eps values must be strictly decreasing");
  }

  const int n = static_cast<int>(eps_list.size());
  State s0{u0, v0, 0.0};
  double dt_fixed = std::numeric_limits<double>::infinity();
  for (double eps : eps_list) {
    ModelParams q = p;
    q.eps = eps;
    dt_fixed = std::min(dt_fixed, admissible_dt(s0, q, g, c));
  }

  std::vector<std::optional<Trajectory>> trajs(static_cast<size_t>(n));
  std::vector<std::string> failures(static_cast<size_t>(n));
  parallel_for(n, [&](int i) {
    ModelParams q = p;
    q.eps = eps_list[static_cast<size_t>(i)];
    try {
      trajs[static_cast<size_t>(i)] = run_fixed_dt(u0, v0, q, g, c, dt_fixed);
    } catch (const std::exception& ex) {
      failures[static_cast<size_t>(i)] =
          "eps=" + std::to_string(q.eps) + ": " + ex.what();
    }
  });

  SweepResult res;
  res.axis = "eps";
  res.samples = eps_list;
  for (const auto& f : failures)
    if (!f.empty()) res.failures.push_back(f);

  std::vector<double> pair_eps, du, dv;
  std::vector<bool> pair_ok;
  for (int i = 0; i + 1 < n; ++i) {
    const auto& a = trajs[static_cast<size_t>(i)];
    const auto& b = trajs[static_cast<size_t>(i + 1)];
    double eps_label = eps_list[static_cast<size_t>(i + 1)];
    if (!a || !b) {
      pair_eps.push_back(eps_label);
      du.push_back(std::numeric_limits<double>::quiet_NaN());
      dv.push_back(std::numeric_limits<double>::quiet_NaN());
      pair_ok.push_back(false);
      continue;
    }
    require_aligned(*a, *b);
    const auto& sa = a->snapshots;
    const auto& sb = b->snapshots;
    double u_l1 = 0.0, v_l2_sq = 0.0;
    for (size_t k = 0; k + 1 < sa.size(); ++k) {
      auto val = [&](size_t j) {
        double su = 0.0, sv = 0.0;
        for (size_t m = 0; m < sa[j].u.size(); ++m) {
          su += std::abs(sa[j].u[m] - sb[j].u[m]);
          double d = sa[j].v[m] - sb[j].v[m];
          sv += d * d;
        }
        return std::pair<double, double>{g.cell_volume * su, g.cell_volume * sv};
      };
      auto [u0k, v0k] = val(k);
      auto [u1k, v1k] = val(k + 1);
      double w = 0.5 * (sa[k + 1].t - sa[k].t);
      u_l1 += w * (u0k + u1k);
      v_l2_sq += w * (v0k + v1k);
    }
    pair_eps.push_back(eps_label);
    du.push_back(u_l1);
    dv.push_back(std::sqrt(v_l2_sq));
    pair_ok.push_back(true);
  }

  const double order_u = fit_order(pair_eps, du);
  const double order_v = fit_order(pair_eps, dv);
  for (size_t i = 0; i < pair_eps.size(); ++i) {
    res.rows.push_back({pair_eps[i], "u_l1_spacetime", du[i], order_u, pair_ok[i]});
    res.rows.push_back({pair_eps[i], "v_l2_spacetime", dv[i], order_v, pair_ok[i]});
  }
  return res;
}

SweepResult refinement_study(const InitialSampler& initial, const ModelParams& p,
                             const Grid& g0, const StepConfig& c,
                             const RefinementSpec& spec, const ExactFinal& exact) {
  if (spec.levels < 3)
    throw std::invalid_argument("refinement_study: need at least 3 levels");
  if (spec.dt_power < 1)
    throw std::invalid_argument("refinement_study: requires dt_power >= 1");

  const int L = spec.levels;
  std::vector<Grid> grids;
  for (int l = 0; l < L; ++l) {
    std::array<int, 2> n = g0.n;
    for (int a = 0; a < g0.dim; ++a) n[a] = g0.n[a] << l;
    grids.push_back(build_grid(g0.dim, g0.lo, g0.hi, n));
  }

  std::vector<std::pair<Field, Field>> data;
  data.reserve(static_cast<size_t>(L));
  for (int l = 0; l < L; ++l) data.push_back(initial(grids[static_cast<size_t>(l)]));

  double dt0 = spec.dt0;
  if (dt0 <= 0.0) {
    State s0{data[0].first, data[0].second, 0.0};
    dt0 = admissible_dt(s0, p, grids[0], c);
  }

  std::vector<std::optional<Trajectory>> trajs(static_cast<size_t>(L));
  std::vector<std::string> failures(static_cast<size_t>(L));
  parallel_for(L, [&](int l) {
    double dt = dt0 / std::pow(2.0, l * spec.dt_power);
    try {
      trajs[static_cast<size_t>(l)] =
          run_fixed_dt(data[static_cast<size_t>(l)].first,
                       data[static_cast<size_t>(l)].second, p,
                       grids[static_cast<size_t>(l)], c, dt);
    } catch (const std::exception& ex) {
      failures[static_cast<size_t>(l)] =
          "level " + std::to_string(l) + ": " + ex.what();
    }
  });

  SweepResult res;
  res.axis = spec.axis;
  for (const auto& f : failures)
    if (!f.empty()) res.failures.push_back(f);

  const bool uniform =
      std::all_of(data[0].first.begin(), data[0].first.end(),
                  [&](double x) { return x == data[0].first[0]; }) &&
      std::all_of(data[0].second.begin(), data[0].second.end(),
                  [&](double x) { return x == data[0].second[0]; });

  auto exact_fields = [&](int l) -> std::pair<Field, Field> {
    const Grid& g = grids[static_cast<size_t>(l)];
    if (exact) return exact(g);
    OracleResult o = ode_oracle(data[0].first[0], data[0].second[0], p, p.t_end);
    return {Field(static_cast<size_t>(g.cells()), o.u),
            Field(static_cast<size_t>(g.cells()), o.v)};
  };

  std::vector<double> hs, eu, ev;
  const int n_err_levels = (exact || uniform) ? L : L - 1;
  for (int l = 0; l < n_err_levels; ++l) {
    res.samples.push_back(grids[static_cast<size_t>(l)].max_h());
    if (!trajs[static_cast<size_t>(l)] ||
        ((exact || uniform) ? false : !trajs[static_cast<size_t>(L - 1)])) {
      hs.push_back(grids[static_cast<size_t>(l)].max_h());
      eu.push_back(std::numeric_limits<double>::quiet_NaN());
      ev.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const State& fin = trajs[static_cast<size_t>(l)]->snapshots.back();
    Field ru, rv;
    if (exact || uniform) {
      auto [xu, xv] = exact_fields(l);
      ru = std::move(xu);
      rv = std::move(xv);
    } else {
      const State& finest = trajs[static_cast<size_t>(L - 1)]->snapshots.back();
      ru = restrict_to(finest.u, grids[static_cast<size_t>(L - 1)],
                       grids[static_cast<size_t>(l)]);
      rv = restrict_to(finest.v, grids[static_cast<size_t>(L - 1)],
                       grids[static_cast<size_t>(l)]);
    }
    hs.push_back(grids[static_cast<size_t>(l)].max_h());
    eu.push_back(l2_diff(fin.u, ru, grids[static_cast<size_t>(l)]));
    ev.push_back(l2_diff(fin.v, rv, grids[static_cast<size_t>(l)]));
  }

  const double order_u = fit_order(hs, eu);
  const double order_v = fit_order(hs, ev);
  for (size_t i = 0; i < hs.size(); ++i) {
    bool ok = std::isfinite(eu[i]);
    res.rows.push_back({hs[i], "u_l2_final", eu[i], order_u, ok});
    res.rows.push_back({hs[i], "v_l2_final", ev[i], order_v, ok});
  }
  return res;
}

}  // namespace chemsim
