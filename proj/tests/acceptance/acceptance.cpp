// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance 1 5 9      run a subset
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ibkit/simulation.hpp"

using namespace ibkit;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string fmt(double v, int digits = 3) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Least-squares slope of log y against log x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sxy += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
    sxx += (std::log(x[k]) - mx) * (std::log(x[k]) - mx);
  }
  return sxy / sxx;
}

// Fit over the `count` entries with the smallest x (x sorted descending).
double tail_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t count) {
  return fit_slope({x.end() - count, x.end()}, {y.end() - count, y.end()});
}

template <Centering C>
Field<C> random_field(const GridSpec& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Field<C> f(g);
  for (double& v : f.data()) v = d(rng);
  return f;
}

EdgeVectorField random_edges(const GridSpec& g, std::mt19937& rng) {
  return {random_field<Centering::XEdge>(g, rng), random_field<Centering::YEdge>(g, rng)};
}

EdgeVectorField random_solenoidal(const GridSpec& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  EdgeVectorField w = perp_grad(random_field<Centering::Node>(g, rng));
  w.u += XEdgeField(g, d(rng));
  w.v += YEdgeField(g, d(rng));
  return w;
}

// Taylor-Green sampled directly from its formula at edge midpoints.
EdgeVectorField taylor_green_oracle(const GridSpec& g, double t, double nu) {
  const double a = 2.0 * std::exp(-8.0 * kPi * kPi * nu * t);
  EdgeVectorField w(g);
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      const double xu = i * g.h(), yu = (j + 0.5) * g.h();
      const double xv = (i + 0.5) * g.h(), yv = j * g.h();
      w.u(i, j) = 1.0 + a * std::sin(2 * kPi * (yu - t)) * std::cos(2 * kPi * (xu - t));
      w.v(i, j) = 1.0 - a * std::cos(2 * kPi * (yv - t)) * std::sin(2 * kPi * (xv - t));
    }
  }
  return w;
}

std::vector<Vec2> random_points(int count, double length, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(0.0, length);
  std::vector<Vec2> p(count);
  for (Vec2& x : p) x = {d(rng), d(rng)};
  return p;
}

const char* kCompositeSmooth[] = {"bs3bs2", "bs4bs3", "bs5bs4", "bs6bs5"};

// ---------------------------------------------------------------------------

Verdict criterion1() {
  Verdict v;
  std::mt19937 rng(101);
  const GridSpec g(32, 1.0);
  const double h2 = g.h() * g.h();
  double cg = 0, dp = 0, cp = 0, sbp = 0, sbpp = 0;
  for (int t = 0; t < 100; ++t) {
    const CellField p = random_field<Centering::Cell>(g, rng);
    const NodeField a = random_field<Centering::Node>(g, rng);
    const EdgeVectorField w = random_edges(g, rng);
    cg = std::max(cg, max_abs(curl(grad(p))) * h2 / max_abs(p));
    dp = std::max(dp, max_abs(div(perp_grad(a))) * h2 / max_abs(a));
    // Five-point nodal Laplacian written out independently.
    NodeField lap(g);
    for (int i = 0; i < g.n(); ++i) {
      for (int j = 0; j < g.n(); ++j) {
        lap(i, j) = (a(i + 1, j) + a(i - 1, j) + a(i, j + 1) + a(i, j - 1) - 4 * a(i, j)) / h2;
      }
    }
    cp = std::max(cp, max_abs(curl(perp_grad(a)) - lap) * h2 / max_abs(a));
    double l = 0, r = 0, lp = 0, rp = 0;
    const EdgeVectorField gp = grad(p), pa = perp_grad(a);
    const CellField dw = div(w);
    const NodeField cw = curl(w);
    for (int i = 0; i < g.n(); ++i) {
      for (int j = 0; j < g.n(); ++j) {
        l += (gp.u(i, j) * w.u(i, j) + gp.v(i, j) * w.v(i, j)) * h2;
        r -= p(i, j) * dw(i, j) * h2;
        lp += (pa.u(i, j) * w.u(i, j) + pa.v(i, j) * w.v(i, j)) * h2;
        rp -= a(i, j) * cw(i, j) * h2;
      }
    }
    sbp = std::max(sbp, std::abs(l - r) / std::max(std::abs(l), 1.0));
    sbpp = std::max(sbpp, std::abs(lp - rp) / std::max(std::abs(lp), 1.0));
  }
  v.require(cg <= 1e-12, "curl grad " + fmt(cg));
  v.require(dp <= 1e-12, "div perp_grad " + fmt(dp));
  v.require(cp <= 1e-12, "curl perp_grad - lap " + fmt(cp));
  v.require(sbp <= 1e-12, "sbp grad/div " + fmt(sbp));
  v.require(sbpp <= 1e-12, "sbp perp_grad/curl " + fmt(sbpp));
  return v;
}

Verdict criterion2() {
  Verdict v;
  std::mt19937 rng(202);
  const GridSpec g(32, 1.0);
  auto solver = std::make_shared<const SpectralSolver>(g);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  auto trial = [&](const CouplingScheme& s, const EdgeVectorField& w) {
    const auto X = random_points(25, 1.0, rng);
    std::vector<Vec2> F(X.size());
    for (Vec2& f : F) f = {d(rng), d(rng)};
    const double ds = 2 * kPi / X.size();
    const EdgeVectorField sf = s.spread(F, X, ds);
    double lhs = 0;
    for (int i = 0; i < g.n(); ++i) {
      for (int j = 0; j < g.n(); ++j) lhs += (w.u(i, j) * sf.u(i, j) + w.v(i, j) * sf.v(i, j)) * g.h() * g.h();
    }
    const auto U = s.interpolate(w, X);
    double rhs = 0;
    for (std::size_t k = 0; k < X.size(); ++k) rhs += (U[k].x * F[k].x + U[k].y * F[k].y) * ds;
    return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
  };
  double worst = 0;
  for (std::string_view name : kernel_names()) {
    const CouplingScheme s = CouplingScheme::standard(parse_kernel(name, g.h()), g);
    for (int t = 0; t < 50; ++t) worst = std::max(worst, trial(s, random_edges(g, rng)));
  }
  v.require(worst <= 1e-11, "standard IB, 7 kernels " + fmt(worst));
  const CouplingScheme s = CouplingScheme::dfib(Kernel1D::ib6(), solver);
  double wd = 0;
  for (int t = 0; t < 50; ++t) wd = std::max(wd, trial(s, random_solenoidal(g, rng)));
  v.require(wd <= 1e-11, "DFIB ib6 " + fmt(wd));
  return v;
}

Verdict criterion3() {
  Verdict v;
  std::mt19937 rng(303);
  const GridSpec g(32, 1.0);
  const auto probes = random_points(1000, 1.0, rng);
  const EdgeVectorField tg = taylor_green_oracle(g, 0.0, 0.1);
  double worst = 0;
  for (const char* name : kCompositeSmooth) {
    const CompositeDelta d = parse_kernel(name, g.h());
    for (int t = 0; t < 3; ++t) {
      const EdgeVectorField w = random_solenoidal(g, rng);
      for (const Vec2& x : probes) worst = std::max(worst, std::abs(ib_interpolant_divergence(w, x, d)));
    }
    for (const Vec2& x : probes) worst = std::max(worst, std::abs(ib_interpolant_divergence(tg, x, d)));
  }
  v.require(worst <= 1e-11, "composite max |div| " + fmt(worst));
  const CompositeDelta ib4 = parse_kernel("ib4", g.h());
  double control = 0;
  for (const Vec2& x : probes) control = std::max(control, std::abs(ib_interpolant_divergence(tg, x, ib4)));
  v.require(control > 1e-3, "IB4 control " + fmt(control));
  return v;
}

Verdict criterion4() {
  Verdict v;
  struct Scheme {
    const char* kernel;
    const char* method;
  };
  const std::vector<Scheme> schemes = {{"bs2bs1", "ib"}, {"bs3bs2", "ib"}, {"bs4bs3", "ib"}, {"bs5bs4", "ib"},
                                       {"bs6bs5", "ib"}, {"ib4", "ib"},     {"ib6", "dfib"}};
  const std::vector<double> fracs = {8, 16, 32, 64, 128, 256, 512};
  std::vector<double> err(schemes.size() * fracs.size());
  // Longest jobs first keeps the workers balanced.
  std::vector<int> order(err.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return fracs[a % fracs.size()] > fracs[b % fracs.size()]; });
  parallel_for(static_cast<int>(err.size()), [&](int job) {
    const int k = order[job];
    ExperimentConfig c = default_config("advect");
    c.kernel = schemes[k / fracs.size()].kernel;
    c.method = schemes[k / fracs.size()].method;
    c.dt_frac = fracs[k % fracs.size()];
    err[k] = run_advection_test(c).mean_rel_error;
  });
  auto series = [&](std::size_t s) {
    return std::vector<double>(err.begin() + s * fracs.size(), err.begin() + (s + 1) * fracs.size());
  };
  std::vector<double> dts;
  for (double f : fracs) dts.push_back(1.0 / (32.0 * f));
  for (std::size_t s = 1; s < schemes.size(); ++s) {
    if (std::string(schemes[s].kernel) == "ib4") continue;
    const double slope = tail_slope(dts, series(s), 3);
    const std::string name = std::string(schemes[s].method) == "dfib" ? "dfib" : schemes[s].kernel;
    v.require(std::abs(slope - 2.0) <= 0.2, name + " slope " + fmt(slope));
  }
  const auto ib4 = series(5);
  const double ratio = ib4[ib4.size() - 2] / ib4.back();
  v.require(ratio < 1.5, "ib4 last-two ratio " + fmt(ratio) + " (" + fmt(ib4[ib4.size() - 2]) + ", " +
                             fmt(ib4.back()) + ")");
  const auto bs21 = series(0);
  const auto bs32 = series(1);
  const double plateau = *std::min_element(bs21.end() - 3, bs21.end());
  const double best = *std::min_element(bs32.begin(), bs32.end());
  v.require(plateau > best, "bs2bs1 plateau " + fmt(plateau) + " > bs3bs2 min " + fmt(best));
  return v;
}

Verdict criterion5() {
  Verdict v;
  const std::vector<std::pair<const char*, const char*>> runs = {
      {"bs5bs4", "ib"}, {"bs6bs5", "ib"}, {"ib6", "dfib"}, {"ib4", "ib"}, {"bs2bs1", "ib"}};
  std::vector<MembraneResult> res(runs.size());
  parallel_for(static_cast<int>(runs.size()), [&](int k) {
    ExperimentConfig c = default_config("membrane-eq");
    c.n = 64;
    c.dt_frac = 8;
    c.mfac = 0.5;
    c.t_final = 1.0;
    c.kernel = runs[k].first;
    c.method = runs[k].second;
    res[k] = run_equilibrium_membrane(c);
  });
  for (int k = 0; k < 3; ++k) {
    const std::string name = std::string(runs[k].second) == "dfib" ? "dfib" : runs[k].first;
    v.require(res[k].max_rel_area_err <= 1e-11, name + " max dA " + fmt(res[k].max_rel_area_err));
  }
  const double ratio = res[3].rows.back().rel_area_err / res[4].rows.back().rel_area_err;
  v.require(ratio >= 3.0, "dA(ib4)/dA(bs2bs1) " + fmt(ratio));
  return v;
}

Verdict criterion6() {
  Verdict v;
  std::vector<double> ladder;
  for (double m = 0.25; m >= 1.0 / 256.0; m /= 2) ladder.push_back(m);
  const std::vector<std::pair<const char*, double>> expect = {
      {"bs2bs1", 1}, {"bs3bs2", 2}, {"bs4bs3", 3}, {"bs5bs4", 4}, {"bs6bs5", 5}};
  auto run = [&](const char* kernel, const char* method) {
    ExperimentConfig c = default_config("curl-diag");
    c.n = 64;
    c.kernel = kernel;
    c.method = method;
    return curl_of_spread_force(c, ladder);
  };
  auto slope_of = [](const std::vector<CurlRow>& rows) {
    std::vector<double> ds, w;
    for (const CurlRow& r : rows) {
      ds.push_back(r.ds);
      w.push_back(r.max_curl_f);
    }
    return fit_slope(ds, w);
  };
  for (const auto& [kernel, order] : expect) {
    const double s = slope_of(run(kernel, "ib"));
    v.require(std::abs(s - order) <= 0.5, std::string(kernel) + " " + fmt(s));
  }
  double residual = 0;
  for (const CurlRow& r : run("ib6", "dfib")) residual = std::max(residual, r.dfib_residual);
  v.require(residual <= 1e-11, "dfib residual " + fmt(residual));
  const double s4 = slope_of(run("ib4", "ib"));
  v.require(s4 >= -0.2, "ib4 " + fmt(s4));
  return v;
}

Verdict criterion7() {
  Verdict v;
  const std::vector<double> mfacs = {2.0, 1.0, 0.5, 0.25};
  struct Case {
    const char* kernel;
    const char* method;
    double target;
    double tol;
  };
  const std::vector<Case> cases = {{"bs3bs2", "ib", 2, 0.5}, {"bs4bs3", "ib", 3, 0.7}, {"bs5bs4", "ib", 3, 0.7},
                                   {"bs6bs5", "ib", 3, 0.7}, {"ib6", "dfib", 3, 0.7},  {"ib4", "ib", -1, 0}};
  std::vector<double> l2(cases.size() * mfacs.size()), ds(l2.size());
  parallel_for(static_cast<int>(l2.size()), [&](int k) {
    ExperimentConfig c = default_config("membrane-eq");
    c.n = 64;
    c.t_final = 1.0;
    c.kernel = cases[k / mfacs.size()].kernel;
    c.method = cases[k / mfacs.size()].method;
    c.mfac = mfacs[k % mfacs.size()];
    const MembraneResult r = run_equilibrium_membrane(c);
    l2[k] = r.final_force.l2;
    ds[k] = 2 * kPi / static_cast<double>(r.final_markers.size());
  });
  for (std::size_t s = 0; s < cases.size(); ++s) {
    const std::vector<double> x(ds.begin() + s * mfacs.size(), ds.begin() + (s + 1) * mfacs.size());
    const std::vector<double> y(l2.begin() + s * mfacs.size(), l2.begin() + (s + 1) * mfacs.size());
    const double slope = fit_slope(x, y);
    const std::string name = std::string(cases[s].method) == "dfib" ? "dfib" : cases[s].kernel;
    if (cases[s].target < 0) {
      v.require(slope <= 0.5, name + " " + fmt(slope));
    } else {
      v.require(std::abs(slope - cases[s].target) <= cases[s].tol, name + " " + fmt(slope));
    }
  }
  return v;
}

Verdict criterion8() {
  Verdict v;
  const std::vector<std::pair<const char*, const char*>> runs = {
      {"bs5bs4", "ib"}, {"ib6", "dfib"}, {"ib4", "ib"}, {"bs2bs1", "ib"}};
  std::vector<ParametricResult> res(runs.size() * 2);
  parallel_for(static_cast<int>(res.size()), [&](int k) {
    ExperimentConfig c = default_config("membrane-param");
    c.n = 64;
    c.kernel = runs[k / 2].first;
    c.method = runs[k / 2].second;
    c.dt_frac = k % 2 == 0 ? 10 : 20;
    res[k] = run_parametric_membrane(c);
  });
  auto ratio = [&](int r) { return res[2 * r].max_rel_area_err / res[2 * r + 1].max_rel_area_err; };
  for (int r = 0; r < 2; ++r) {
    const std::string name = std::string(runs[r].second) == "dfib" ? "dfib" : runs[r].first;
    const bool stable = !res[2 * r].unstable && !res[2 * r + 1].unstable;
    v.require(stable && ratio(r) >= 3 && ratio(r) <= 5, name + " ratio " + fmt(ratio(r)));
  }
  v.require(!res[4].unstable && !res[5].unstable && ratio(2) >= 0.8 && ratio(2) <= 1.25,
            "ib4 ratio " + fmt(ratio(2)));
  v.require(res[6].unstable, res[6].unstable ? "bs2bs1 unstable at h/10, step " + std::to_string(res[6].failed_step)
                                             : "bs2bs1 stable at h/10");
  return v;
}

Verdict criterion9() {
  Verdict v;
  for (const char* kernel : {"ib4", "ib6"}) {
    ExperimentConfig c = default_config("spurious");
    c.kernel = kernel;
    c.method = "ib";
    auto slopes = [&](SweepParameter p, const std::vector<double>& values) {
      const auto rows = run_spurious_flow_study(c, p, values);
      std::vector<double> x, u, w;
      for (const SpuriousRow& r : rows) {
        x.push_back(r.value);
        u.push_back(r.max_velocity);
        w.push_back(r.max_vorticity);
      }
      return std::pair{fit_slope(x, u), fit_slope(x, w)};
    };
    const auto [uh, wh] = slopes(SweepParameter::MeshWidth, {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256});
    const auto [uk, wk] = slopes(SweepParameter::Stiffness, {0.25, 0.5, 1.0, 2.0, 4.0});
    const auto [um, wm] = slopes(SweepParameter::Viscosity, {0.025, 0.05, 0.1, 0.2, 0.4});
    (void)wk;
    (void)wm;
    const std::string k = kernel;
    v.require(std::abs(uh - 1) <= 0.3, k + " u~h " + fmt(uh));
    v.require(std::abs(uk - 1) <= 0.3, k + " u~kappa " + fmt(uk));
    v.require(std::abs(um + 1) <= 0.3, k + " u~mu " + fmt(um));
    v.require(std::abs(wh) <= 0.3, k + " w~h " + fmt(wh));
  }
  return v;
}

Verdict criterion10() {
  Verdict v;
  ExperimentConfig c = default_config("lte");
  const std::vector<int> sizes = {32, 64, 128};
  std::vector<double> dts;
  for (int k = 0; k <= 12; ++k) dts.push_back(1e-2 * std::pow(0.25, k));
  for (auto [integ, name] : {std::pair{Integrator::ForwardEuler, "euler"},
                             std::pair{Integrator::ExplicitMidpoint, "midpoint"}}) {
    const auto rows = run_lte_study(c, integ, sizes, dts, 404);
    auto err = [&](std::size_t g, std::size_t d) { return std::max(rows[g * dts.size() + d].rel_area_err, 1e-300); };
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      std::vector<double> e;
      for (std::size_t d = 0; d < dts.size(); ++d) e.push_back(err(g, d));
      const double s = tail_slope(dts, e, 3);
      v.require(std::abs(s - 1.0) <= 0.2, std::string(name) + " N=" + std::to_string(sizes[g]) + " slope " + fmt(s));
    }
    for (std::size_t g = 0; g + 1 < sizes.size(); ++g) {
      const double r = err(g, dts.size() - 1) / err(g + 1, dts.size() - 1);
      v.require(r >= 1.4 && r <= 2.6, std::string(name) + " plateau ratio N=" + std::to_string(sizes[g]) + "/" +
                                          std::to_string(sizes[g + 1]) + " " + fmt(r));
    }
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"operator identities", criterion1},
      {"transfer adjointness", criterion2},
      {"divergence-free interpolation", criterion3},
      {"advection study", criterion4},
      {"equilibrium membrane area", criterion5},
      {"curl of spread force", criterion6},
      {"Lagrangian force convergence", criterion7},
      {"parametric membrane", criterion8},
      {"spurious-flow scalings", criterion9},
      {"single-step truncation error", criterion10},
  };
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));
  if (selected.empty()) {
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);
  }

  int failed = 0;
  for (int k : selected) {
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", k);
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v = criteria[k - 1].second();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", k, criteria[k - 1].first,
                v.detail.str().c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
