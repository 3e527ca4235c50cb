#include "ibkit/simulation.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

namespace ibkit {
namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::array<std::string_view, 6> kExperiments = {"advect",   "membrane-eq", "membrane-param",
                                                          "curl-diag", "spurious",    "lte"};

bool all_finite(std::span<const Vec2> pts) {
  return std::all_of(pts.begin(), pts.end(), [](const Vec2& p) { return std::isfinite(p.x) && std::isfinite(p.y); });
}

std::vector<Vec2> concat(std::span<const Vec2> a, std::span<const Vec2> b) {
  std::vector<Vec2> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<Vec2> circle_points(Vec2 center, double r, int count) { return init_circle(center, r, count).X; }

TracerSet make_tracers(const std::function<std::vector<Vec2>(int)>& generate, int markers, double exact_area,
                       int fixed_multiplier) {
  if (fixed_multiplier > 0) {
    TracerSet t;
    t.X = generate(fixed_multiplier * markers);
    t.multiplier = fixed_multiplier;
    t.initial_rel_error = relative_area_error(exact_area, area_green(t.X));
    return t;
  }
  return select_tracers(generate, markers, exact_area);
}

int step_count(double t_final, double dt) {
  return static_cast<int>(std::llround(t_final / dt));
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end()) {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
  if (!is_power_of_two(n) || n < 8) {
    throw std::invalid_argument("N must be a power of two (at least 8), got " + std::to_string(n));
  }
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(length, "domain length");
  positive(dt_frac, "dt-frac");
  positive(t_final, "t-final");
  positive(mfac, "mfac");
  positive(rho, "rho");
  positive(mu, "mu");
  positive(kappa0, "kappa0");
  positive(radius, "radius");
  if (!(tau >= 0.0 && tau <= 0.5)) throw std::invalid_argument("tau must lie in [0, 1/2]");
  if (!(omega0 >= 0.0)) throw std::invalid_argument("omega0 must be nonnegative");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in [0, 1)");
  if (mode_p < 2) throw std::invalid_argument("mode p must be at least 2");
  if (tracer_multiplier < 0) throw std::invalid_argument("tracer multiplier must be nonnegative");
  if (!(radius * (1.0 + eps) < 0.5 * length)) throw std::invalid_argument("membrane does not fit in the domain");

  const CompositeDelta delta = parse_kernel(kernel, h());
  if (method == "dfib") {
    if (!delta.is_isotropic()) {
      throw std::invalid_argument("DFIB requires an isotropic kernel (ib6), got " + kernel);
    }
    if (delta.normal.smoothness() < 2) throw std::invalid_argument("DFIB requires C² kernel, got " + kernel);
  } else if (method != "ib") {
    throw std::invalid_argument("method must be 'ib' or 'dfib', got '" + method + "'");
  }
}

ExperimentConfig default_config(std::string_view experiment) {
  ExperimentConfig c;
  c.experiment = std::string(experiment);
  if (experiment == "advect") {
    c.n = 32;
    c.dt_frac = 8;
    c.t_final = 1.0;
    c.mfac = 0.5;
  } else if (experiment == "membrane-eq" || experiment == "curl-diag") {
    c.n = 64;
    c.dt_frac = 8;
    c.t_final = 2.0;
    c.mfac = 0.5;
  } else if (experiment == "membrane-param") {
    c.n = 64;
    c.length = 5.0;
    c.dt_frac = 10;
    c.t_final = 4.0;
    c.mfac = 1.0;
    c.mu = 0.15;
    c.radius = 1.0;
    c.kappa0 = 10.0;
    c.omega0 = 10.0;
    c.mode_p = 2;
    c.eps = 0.05;
    c.tau = 0.4;
    c.kernel = "bs5bs4";
  } else if (experiment == "spurious") {
    c.n = 64;
    c.dt_frac = 8;
    c.t_final = 0.05;
    c.mfac = 0.125;
    c.kernel = "ib4";
  } else if (experiment == "lte") {
    c.n = 32;
    c.kernel = "bs2bs1";
    c.t_final = 1.0;
  } else {
    throw std::invalid_argument("unknown experiment '" + std::string(experiment) + "'");
  }
  return c;
}

std::span<const std::string_view> experiment_names() { return kExperiments; }

CouplingScheme make_scheme(const ExperimentConfig& config, std::shared_ptr<const SpectralSolver> solver) {
  const GridSpec grid = config.grid();
  const CompositeDelta delta = parse_kernel(config.kernel, grid.h());
  if (config.method == "dfib") {
    if (!delta.is_isotropic()) throw std::invalid_argument("DFIB requires an isotropic kernel (ib6)");
    return CouplingScheme::dfib(delta.normal, std::move(solver));
  }
  return CouplingScheme::standard(delta, grid);
}

InstabilityError::InstabilityError(int step, const std::string& what)
    : std::runtime_error("unstable at step " + std::to_string(step) + ": " + what), step_(step) {}

// ---------------------------------------------------------------------------
// Time stepping

StepReport fsi_step(SimState& st, const CouplingScheme& scheme, const SpectralSolver& solver,
                    const SpringModel& spring, bool check_pairing) {
  const GridSpec& grid = solver.grid();
  const double dt = st.dt;
  const int m = st.curve.size();
  const double ds = st.curve.ds;
  const int failing = st.step + 1;

  const std::vector<Vec2> points = concat(st.curve.X, st.tracers);
  const std::vector<Vec2> U0 = scheme.interpolate(st.u, points);
  std::vector<Vec2> half(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) half[k] = points[k] + U0[k] * (0.5 * dt);
  const std::span<const Vec2> markers_half(half.data(), m);

  const std::vector<Vec2> F = spring_force(markers_half, ds, spring.kappa(st.t + 0.5 * dt));
  const EdgeVectorField f = scheme.spread(F, markers_half, ds);

  const EdgeVectorField n_now = convective(st.u);
  EdgeVectorField n_half(grid);
  if (st.prev_convective) {
    n_half = 1.5 * n_now - 0.5 * *st.prev_convective;
  } else {
    const StokesResult provisional = solver.stokes_step(st.u, f, n_now, st.rho, st.mu, dt);
    n_half = 0.5 * (n_now + convective(provisional.u));
  }
  StokesResult next = solver.stokes_step(st.u, f, n_half, st.rho, st.mu, dt);
  if (!all_finite(next.u)) throw InstabilityError(failing, "non-finite velocity");

  StepReport report;
  if (check_pairing) {
    const std::vector<Vec2> U = scheme.interpolate(st.u, markers_half);
    double lag = 0.0;
    for (int k = 0; k < m; ++k) lag += dot(U[k], F[k]) * ds;
    const double eul = inner(st.u, f);
    const double scale = std::max({std::abs(lag), std::abs(eul), 1e-300});
    report.energy_pairing_error = std::abs(lag - eul) / scale;
  }

  const EdgeVectorField sum = next.u + st.u;
  const std::vector<Vec2> Uc = scheme.interpolate(sum, half);
  const double limit = grid.length();
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vec2 d = Uc[k] * (0.5 * dt);
    if (!(std::abs(d.x) <= limit && std::abs(d.y) <= limit)) {
      throw InstabilityError(failing, "marker displacement exceeds the domain length");
    }
    const Vec2 p = points[k] + d;
    if (k < static_cast<std::size_t>(m)) {
      st.curve.X[k] = p;
    } else {
      st.tracers[k - m] = p;
    }
  }
  if (!all_finite(st.curve.X) || !all_finite(st.tracers)) throw InstabilityError(failing, "non-finite marker");

  const double umax = max_abs(next.u);
  report.max_divergence = umax > 0.0 ? max_abs(div(next.u)) * grid.h() / umax : 0.0;

  st.prev_convective = n_now;
  st.u = std::move(next.u);
  st.step += 1;
  st.t = st.step * dt;
  return report;
}

// ---------------------------------------------------------------------------
// Experiments

EdgeVectorField sample_edges(const GridSpec& grid, const std::function<double(double, double)>& fu,
                             const std::function<double(double, double)>& fv) {
  EdgeVectorField w(grid);
  for (int i = 0; i < grid.n(); ++i) {
    for (int j = 0; j < grid.n(); ++j) {
      w.u(i, j) = fu(w.u.x(i), w.u.y(j));
      w.v(i, j) = fv(w.v.x(i), w.v.y(j));
    }
  }
  return w;
}

EdgeVectorField taylor_green(const GridSpec& grid, double t, double nu) {
  const double amp = 2.0 * std::exp(-8.0 * kPi * kPi * nu * t);
  const double tp = 2.0 * kPi;
  return sample_edges(
      grid, [&](double x, double y) { return 1.0 + amp * std::sin(tp * (y - t)) * std::cos(tp * (x - t)); },
      [&](double x, double y) { return 1.0 - amp * std::cos(tp * (y - t)) * std::sin(tp * (x - t)); });
}

AdvectionResult run_advection_test(const ExperimentConfig& config) {
  config.validate();
  const GridSpec grid = config.grid();
  auto solver = std::make_shared<const SpectralSolver>(grid);
  const CouplingScheme scheme = make_scheme(config, solver);
  const double dt = config.dt();
  const double nu = config.mu / config.rho;
  const Vec2 center{0.5 * config.length, 0.5 * config.length};
  const double r = config.radius;
  const double exact = kPi * r * r;

  const int markers = markers_for_mfac(r, config.mfac, grid.h());
  const TracerSet ts = make_tracers([&](int count) { return circle_points(center, r, count); }, markers, exact,
                                    config.tracer_multiplier);

  AdvectionResult res{AreaAudit(exact), static_cast<int>(ts.X.size()), ts.multiplier, 0.0};
  std::vector<Vec2> X = ts.X;
  res.audit.record(0.0, area_green(X));

  const int steps = step_count(config.t_final, dt);
  std::vector<Vec2> half(X.size());
  for (int n = 0; n < steps; ++n) {
    const double t = n * dt;
    const std::vector<Vec2> U1 = scheme.interpolate(taylor_green(grid, t, nu), X);
    for (std::size_t k = 0; k < X.size(); ++k) half[k] = X[k] + U1[k] * (0.5 * dt);
    const std::vector<Vec2> U2 = scheme.interpolate(taylor_green(grid, t + 0.5 * dt, nu), half);
    for (std::size_t k = 0; k < X.size(); ++k) X[k] += U2[k] * dt;
    res.audit.record((n + 1) * dt, area_green(X));
  }
  res.mean_rel_error = res.audit.mean_relative_error(0.0, 1.0 + 0.5 * dt);
  return res;
}

namespace {

struct MembraneSetup {
  GridSpec grid;
  std::shared_ptr<const SpectralSolver> solver;
  CouplingScheme scheme;
  SimState state;
  double exact_area;
};

MembraneRow membrane_row(const SimState& st, const SpringModel& spring, double r, double exact, bool circle) {
  MembraneRow row{st.step, st.t, 0.0, max_abs(curl(st.u)), max_speed(st.u), 0.0};
  if (!st.tracers.empty()) row.rel_area_err = relative_area_error(exact, area_green(st.tracers));
  if (circle) {
    const double kappa = spring.kappa(st.t);
    row.force_l2_err = force_error_norms(spring_force(st.curve.X, st.curve.ds, kappa), st.curve.ds, kappa, r).l2;
  }
  return row;
}

MembraneSetup setup_membrane(const ExperimentConfig& config, bool perturbed, bool with_tracers) {
  config.validate();
  const GridSpec grid = config.grid();
  auto solver = std::make_shared<const SpectralSolver>(grid);
  CouplingScheme scheme = make_scheme(config, solver);
  const double r = config.radius;
  const int markers = markers_for_mfac(r, config.mfac, grid.h());
  const Vec2 center{0.5 * config.length, 0.5 * config.length};

  std::function<Curve(int)> make_curve;
  double exact = 0.0;
  if (perturbed) {
    make_curve = [&](int count) {
      return init_perturbed_circle(config.length, r, config.eps, config.mode_p, count);
    };
    exact = perturbed_circle_area(r, config.eps, config.mode_p);
  } else {
    make_curve = [&](int count) { return init_circle(center, r, count); };
    exact = kPi * r * r;
  }
  Curve curve = make_curve(markers);
  curve.mfac = config.mfac;
  std::vector<Vec2> tracers;
  if (with_tracers) {
    tracers = make_tracers([&](int count) { return make_curve(count).X; }, markers, exact,
                           config.tracer_multiplier)
                  .X;
  }
  SimState state(grid, std::move(curve), std::move(tracers), config.rho, config.mu, config.dt());
  return MembraneSetup{grid, solver, std::move(scheme), std::move(state), exact};
}

}  // namespace

MembraneResult run_equilibrium_membrane(const ExperimentConfig& config, bool check_pairing) {
  MembraneSetup s = setup_membrane(config, false, true);
  const SpringModel spring = config.spring();
  MembraneResult res;
  res.tracers = static_cast<int>(s.state.tracers.size());
  res.rows.push_back(membrane_row(s.state, spring, config.radius, s.exact_area, true));

  const int steps = step_count(config.t_final, s.state.dt);
  for (int n = 0; n < steps; ++n) {
    const StepReport rep = fsi_step(s.state, s.scheme, *s.solver, spring, check_pairing);
    res.max_divergence = std::max(res.max_divergence, rep.max_divergence);
    if (rep.energy_pairing_error) res.max_pairing_error = std::max(res.max_pairing_error, *rep.energy_pairing_error);
    res.rows.push_back(membrane_row(s.state, spring, config.radius, s.exact_area, true));
    res.max_rel_area_err = std::max(res.max_rel_area_err, res.rows.back().rel_area_err);
  }
  const double kappa = spring.kappa(s.state.t);
  res.final_force =
      force_error_norms(spring_force(s.state.curve.X, s.state.curve.ds, kappa), s.state.curve.ds, kappa, config.radius);
  res.final_markers = s.state.curve.X;
  return res;
}

std::vector<CurlRow> curl_of_spread_force(const ExperimentConfig& config, std::span<const double> mfacs) {
  config.validate();
  const GridSpec grid = config.grid();
  auto solver = std::make_shared<const SpectralSolver>(grid);
  const CouplingScheme scheme = make_scheme(config, solver);
  const Vec2 center{0.5 * config.length, 0.5 * config.length};

  std::vector<CurlRow> rows;
  for (double mfac : mfacs) {
    const int markers = markers_for_mfac(config.radius, mfac, grid.h());
    const Curve c = init_circle(center, config.radius, markers);
    const std::vector<Vec2> F = spring_force(c.X, c.ds, config.kappa0);
    const EdgeVectorField f = scheme.spread(F, c.X, c.ds);
    const NodeField w = curl(f);
    CurlRow row{mfac, c.ds, max_abs(w), 0.0};
    if (scheme.method() == CouplingMethod::DFIB) {
      row.dfib_residual = max_abs(w - dfib_force_curl(F, c.X, c.ds, scheme.delta().normal, grid));
    }
    rows.push_back(row);
  }
  return rows;
}

ParametricResult run_parametric_membrane(const ExperimentConfig& config) {
  MembraneSetup s = setup_membrane(config, true, true);
  const SpringModel spring = config.spring();
  ParametricResult res;
  res.rows.push_back(membrane_row(s.state, spring, config.radius, s.exact_area, false));
  const int steps = step_count(config.t_final, s.state.dt);
  try {
    for (int n = 0; n < steps; ++n) {
      fsi_step(s.state, s.scheme, *s.solver, spring);
      MembraneRow row = membrane_row(s.state, spring, config.radius, s.exact_area, false);
      if (!std::isfinite(row.rel_area_err)) throw InstabilityError(s.state.step, "non-finite area");
      res.rows.push_back(row);
      res.max_rel_area_err = std::max(res.max_rel_area_err, row.rel_area_err);
    }
  } catch (const InstabilityError& e) {
    res.unstable = true;
    res.failed_step = e.step();
    res.failure = e.what();
  }
  res.final_rel_area_err = res.rows.back().rel_area_err;
  return res;
}

std::vector<SpuriousRow> run_spurious_flow_study(const ExperimentConfig& config, SweepParameter which,
                                                 std::span<const double> values) {
  std::vector<SpuriousRow> rows(values.size());
  parallel_for(static_cast<int>(values.size()), [&](int idx) {
    ExperimentConfig c = config;
    const double v = values[idx];
    switch (which) {
      case SweepParameter::MeshWidth:
        c.n = static_cast<int>(std::lround(c.length / v));
        break;
      case SweepParameter::Stiffness:
        c.kappa0 = v;
        break;
      case SweepParameter::Viscosity:
        c.mu = v;
        break;
    }
    MembraneSetup s = setup_membrane(c, false, false);
    const SpringModel spring = c.spring();
    const int steps = step_count(c.t_final, s.state.dt);
    for (int n = 0; n < steps; ++n) fsi_step(s.state, s.scheme, *s.solver, spring);
    rows[idx] = {v, max_speed(s.state.u), max_abs(curl(s.state.u))};
  });
  return rows;
}

std::vector<LteRow> run_lte_study(const ExperimentConfig& config, Integrator integrator,
                                  std::span<const int> grid_sizes, std::span<const double> dts,
                                  int tracer_count) {
  std::vector<LteRow> rows;
  const Vec2 center{0.5 * config.length, 0.5 * config.length};
  const std::vector<Vec2> X0 = circle_points(center, config.radius, tracer_count);
  const double a0 = area_green(X0);
  for (int n : grid_sizes) {
    ExperimentConfig c = config;
    c.n = n;
    c.validate();
    const GridSpec grid = c.grid();
    auto solver = std::make_shared<const SpectralSolver>(grid);
    const CouplingScheme scheme = make_scheme(c, solver);
    const EdgeVectorField u = sample_edges(
        grid, [](double, double y) { return 3.0 * std::cos(4.0 * kPi * (y - kPi / 4.0)); },
        [](double x, double) { return 2.0 * std::sin(2.0 * kPi * (x - kPi / 4.0)); });
    const std::vector<Vec2> U0 = scheme.interpolate(u, X0);
    for (double dt : dts) {
      std::vector<Vec2> X1(X0.size());
      if (integrator == Integrator::ForwardEuler) {
        for (std::size_t k = 0; k < X0.size(); ++k) X1[k] = X0[k] + U0[k] * dt;
      } else {
        std::vector<Vec2> half(X0.size());
        for (std::size_t k = 0; k < X0.size(); ++k) half[k] = X0[k] + U0[k] * (0.5 * dt);
        const std::vector<Vec2> Uh = scheme.interpolate(u, half);
        for (std::size_t k = 0; k < X0.size(); ++k) X1[k] = X0[k] + Uh[k] * dt;
      }
      rows.push_back({grid.h(), dt, relative_area_error(a0, area_green(X1))});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Sweep helpers

SlopeFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two or more points");
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw std::invalid_argument("slope fit needs positive data");
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  SlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

SlopeFit asymptotic_slope(std::span<const double> x, std::span<const double> y, int count) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(count), order.size());
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < take; ++k) {
    xs.push_back(x[order[k]]);
    ys.push_back(y[order[k]]);
  }
  return loglog_fit(xs, ys);
}

int sweep_threads() {
  if (const char* env = std::getenv("IBKIT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, const std::function<void(int)>& task) {
  const int workers = std::min(count, sweep_threads());
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ibkit
