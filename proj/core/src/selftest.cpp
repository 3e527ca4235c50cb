#include "ibkit/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "ibkit/simulation.hpp"

namespace ibkit {
namespace {

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
  EdgeVectorField w = perp_grad(random_field<Centering::Node>(g, rng));
  w.u += XEdgeField(g, 0.3);
  w.v += YEdgeField(g, -0.2);
  return w;
}

std::vector<Vec2> random_points(int count, double length, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(0.0, length);
  std::vector<Vec2> p(count);
  for (Vec2& x : p) x = {d(rng), d(rng)};
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

double adjoint_error(const CouplingScheme& s, const EdgeVectorField& w, std::mt19937& rng) {
  const auto X = random_points(17, s.grid().length(), rng);
  std::vector<Vec2> F(X.size());
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (Vec2& f : F) f = {d(rng), d(rng)};
  const double ds = 0.01;
  const double lhs = inner(w, s.spread(F, X, ds));
  const auto U = s.interpolate(w, X);
  double rhs = 0.0;
  for (std::size_t k = 0; k < X.size(); ++k) rhs += dot(U[k], F[k]) * ds;
  return rel(lhs, rhs);
}

}  // namespace

std::vector<InvariantCheck> run_invariant_suite(std::uint32_t seed) {
  std::mt19937 rng(seed);
  const GridSpec g(32, 1.0);
  const double h = g.h();
  auto solver = std::make_shared<const SpectralSolver>(g);
  std::vector<InvariantCheck> out;

  double e_cg = 0, e_dp = 0, e_cp = 0, e_sbp = 0, e_sbp_perp = 0;
  for (int t = 0; t < 20; ++t) {
    const CellField p = random_field<Centering::Cell>(g, rng);
    const NodeField a = random_field<Centering::Node>(g, rng);
    const EdgeVectorField w = random_edges(g, rng);
    e_cg = std::max(e_cg, max_abs(curl(grad(p))) * h * h / max_abs(p));
    e_dp = std::max(e_dp, max_abs(div(perp_grad(a))) * h * h / max_abs(a));
    e_cp = std::max(e_cp, max_abs(curl(perp_grad(a)) - laplacian(a)) * h * h / max_abs(a));
    e_sbp = std::max(e_sbp, rel(inner(grad(p), w), -inner(p, div(w))));
    e_sbp_perp = std::max(e_sbp_perp, rel(inner(perp_grad(a), w), -inner(a, curl(w))));
  }
  out.push_back({"curl(grad p) = 0", e_cg, 1e-12});
  out.push_back({"div(perp_grad a) = 0", e_dp, 1e-12});
  out.push_back({"curl(perp_grad a) = laplacian a", e_cp, 1e-12});
  out.push_back({"summation by parts (grad/div)", e_sbp, 1e-12});
  out.push_back({"summation by parts (perp_grad/curl)", e_sbp_perp, 1e-12});

  {
    NodeField gfield = random_field<Centering::Node>(g, rng);
    gfield -= NodeField(g, mean(gfield));
    const NodeField back = solver->poisson_solve(laplacian(gfield));
    out.push_back({"poisson round trip", max_abs(back - gfield) / max_abs(gfield), 1e-11});

    const EdgeVectorField u0 = random_solenoidal(g, rng);
    const EdgeVectorField f = random_edges(g, rng);
    const StokesResult sr = solver->stokes_step(u0, f, EdgeVectorField(g), 1.0, 0.1, 1e-3);
    out.push_back({"stokes step is divergence-free", max_abs(div(sr.u)) * h / max_abs(sr.u), 1e-11});
  }

  double e_adj = 0;
  for (std::string_view name : kernel_names()) {
    const CouplingScheme s = CouplingScheme::standard(parse_kernel(name, h), g);
    for (int t = 0; t < 5; ++t) e_adj = std::max(e_adj, adjoint_error(s, random_edges(g, rng), rng));
  }
  out.push_back({"standard IB adjointness (all kernels)", e_adj, 1e-11});
  {
    const CouplingScheme s = CouplingScheme::dfib(Kernel1D::ib6(), solver);
    double e = 0;
    for (int t = 0; t < 5; ++t) e = std::max(e, adjoint_error(s, random_solenoidal(g, rng), rng));
    out.push_back({"DFIB adjointness (ib6)", e, 1e-11});
  }

  {
    const EdgeVectorField w = random_solenoidal(g, rng);
    const auto probes = random_points(200, g.length(), rng);
    double e = 0;
    for (std::string_view name : {"bs3bs2", "bs4bs3", "bs5bs4", "bs6bs5"}) {
      const CompositeDelta d = parse_kernel(name, h);
      for (const Vec2& x : probes) e = std::max(e, std::abs(ib_interpolant_divergence(w, x, d)));
    }
    out.push_back({"composite interpolant divergence", e, 1e-11});
    const NodeField a = dfib_potential(w, *solver);
    double ed = 0;
    for (const Vec2& x : probes) ed = std::max(ed, std::abs(dfib_interpolant_divergence(a, x, Kernel1D::ib6())));
    out.push_back({"DFIB interpolant divergence", ed, 1e-10});
  }

  {
    const Curve c = init_circle({0.5, 0.5}, 0.25, 4096);
    out.push_back({"spline area of a circle", relative_area_error(std::acos(-1.0) / 16, area_green(c.X)), 1e-13});
  }

  for (const char* method : {"ib", "dfib"}) {
    ExperimentConfig cfg = default_config("membrane-eq");
    cfg.n = 32;
    cfg.method = method;
    cfg.kernel = cfg.method == "ib" ? "bs5bs4" : "ib6";
    const CouplingScheme scheme = make_scheme(cfg, solver);
    SimState st(g, init_circle({0.5, 0.5}, 0.25, 101), {}, 1.0, 0.1, h / 8);
    double e_div = 0, e_pair = 0;
    for (int n = 0; n < 3; ++n) {
      const StepReport r = fsi_step(st, scheme, *solver, cfg.spring(), true);
      e_div = std::max(e_div, r.max_divergence);
      e_pair = std::max(e_pair, r.energy_pairing_error.value_or(0.0));
    }
    const std::string tag = cfg.method == "ib" ? " (bs5bs4)" : " (dfib)";
    out.push_back({"step divergence" + tag, e_div, 1e-10});
    out.push_back({"energy pairing" + tag, e_pair, 1e-11});
  }
  return out;
}

}  // namespace ibkit
