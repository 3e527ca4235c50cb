#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "helpers.hpp"
#include "ibkit/grid.hpp"

using namespace ibkit;
using testing::random_edges;
using testing::random_field;

namespace {

constexpr double kPi = std::numbers::pi;

template <Centering C>
double max_diff(const Field<C>& a, const Field<C>& b) {
  return max_abs(a - b);
}

// Coordinate-addressed sampler: looks a MAC value up by its physical
// position, so the oracle below never touches index arithmetic directly.
struct Sampler {
  const EdgeVectorField& w;
  double h;
  int n;
  int idx(double z) const {
    const int k = static_cast<int>(std::lround(z / h));
    return ((k % n) + n) % n;
  }
  // u lives at (i h, (j + 1/2) h)
  double u(double x, double y) const { return w.u.data()[idx(x) * n + idx(y - 0.5 * h)]; }
  // v lives at ((i + 1/2) h, j h)
  double v(double x, double y) const { return w.v.data()[idx(x - 0.5 * h) * n + idx(y)]; }
};

EdgeVectorField convective_oracle(const EdgeVectorField& w) {
  const GridSpec& g = w.grid();
  const double h = g.h();
  const Sampler s{w, h, g.n()};
  EdgeVectorField out(g);
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      {
        const double x = i * h;
        const double y = (j + 0.5) * h;
        const double vbar = 0.25 * (s.v(x - 0.5 * h, y - 0.5 * h) + s.v(x + 0.5 * h, y - 0.5 * h) +
                                    s.v(x - 0.5 * h, y + 0.5 * h) + s.v(x + 0.5 * h, y + 0.5 * h));
        const double ux = (s.u(x + h, y) - s.u(x - h, y)) / (2 * h);
        const double uy = (s.u(x, y + h) - s.u(x, y - h)) / (2 * h);
        out.u(i, j) = s.u(x, y) * ux + vbar * uy;
      }
      {
        const double x = (i + 0.5) * h;
        const double y = j * h;
        const double ubar = 0.25 * (s.u(x - 0.5 * h, y - 0.5 * h) + s.u(x + 0.5 * h, y - 0.5 * h) +
                                    s.u(x - 0.5 * h, y + 0.5 * h) + s.u(x + 0.5 * h, y + 0.5 * h));
        const double vx = (s.v(x + h, y) - s.v(x - h, y)) / (2 * h);
        const double vy = (s.v(x, y + h) - s.v(x, y - h)) / (2 * h);
        out.v(i, j) = ubar * vx + s.v(x, y) * vy;
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_THROWS_AS(GridSpec(48, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(32, 0.0), std::invalid_argument);
  const GridSpec g(32, 2.0);
  CHECK(g.h() == 2.0 / 32);
  CHECK(g.wrap(-1) == 31);
  CHECK(g.wrap(32) == 0);
  CHECK(g.index(-1, 33) == 31u * 32u + 1u);
}

TEST_CASE("field placement") {
  const GridSpec g(16, 1.0);
  CHECK(CellField(g).x(2) == doctest::Approx(2.5 / 16));
  CHECK(XEdgeField(g).x(2) == doctest::Approx(2.0 / 16));
  CHECK(XEdgeField(g).y(2) == doctest::Approx(2.5 / 16));
  CHECK(YEdgeField(g).x(2) == doctest::Approx(2.5 / 16));
  CHECK(YEdgeField(g).y(2) == doctest::Approx(2.0 / 16));
  CHECK(NodeField(g).y(3) == doctest::Approx(3.0 / 16));
}

TEST_CASE("operator identities hold to roundoff") {
  std::mt19937 rng(7);
  for (int n : {8, 16, 64}) {
    const GridSpec g(n, 1.0);
    CAPTURE(n);
    const auto a = random_field<Centering::Node>(g, rng);
    const auto p = random_field<Centering::Cell>(g, rng);
    const double scale = 1.0 / (g.h() * g.h());

    CHECK(max_diff(curl(perp_grad(a)), laplacian(a)) < 1e-12 * scale);
    CHECK(max_diff(div(grad(p)), laplacian(p)) < 1e-12 * scale);
    CHECK(max_abs(div(perp_grad(a))) < 1e-12 * scale);
    CHECK(max_abs(curl(grad(p))) < 1e-12 * scale);
  }
}

TEST_CASE("summation by parts") {
  std::mt19937 rng(11);
  const GridSpec g(32, 1.3);
  const auto a = random_field<Centering::Node>(g, rng);
  const auto p = random_field<Centering::Cell>(g, rng);
  const auto w = random_edges(g, rng);
  const double lhs1 = inner(perp_grad(a), w);
  CHECK(lhs1 == doctest::Approx(-inner(a, curl(w))).epsilon(1e-12));
  const double lhs2 = inner(grad(p), w);
  CHECK(lhs2 == doctest::Approx(-inner(p, div(w))).epsilon(1e-12));
}

TEST_CASE("laplacian stencil is five-point") {
  const GridSpec g(16, 1.0);
  CellField f(g);
  f(3, 4) = 1.0;
  const CellField l = laplacian(f);
  const double s = 1.0 / (g.h() * g.h());
  CHECK(l(3, 4) == doctest::Approx(-4 * s));
  CHECK(l(2, 4) == doctest::Approx(s));
  CHECK(l(3, 5) == doctest::Approx(s));
  CHECK(l(5, 4) == 0.0);
}

TEST_CASE("curl orientation") {
  // Solid-body-like shear u = -y gives positive vorticity.
  const GridSpec g(16, 1.0);
  EdgeVectorField w(g);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) w.u(i, j) = -static_cast<double>(j);
  const NodeField c = curl(w);
  CHECK(c(5, 5) == doctest::Approx(1.0 / g.h()));
}

TEST_CASE("convective term matches an independent transcription") {
  std::mt19937 rng(3);
  for (int n : {8, 32}) {
    const GridSpec g(n, 2.0);
    const auto w = random_edges(g, rng);
    const auto a = convective(w);
    const auto b = convective_oracle(w);
    CHECK(max_abs(a - b) < 1e-12 * max_abs(b));
  }
}

TEST_CASE("convective term converges at second order") {
  auto error = [](int n) {
    const GridSpec g(n, 1.0);
    EdgeVectorField w(g);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        w.u(i, j) = std::sin(2 * kPi * w.u.x(i)) * std::cos(2 * kPi * w.u.y(j));
        w.v(i, j) = std::cos(2 * kPi * w.v.y(j)) + 0.5 * std::sin(2 * kPi * w.v.x(i));
      }
    }
    const auto c = convective(w);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double x = w.u.x(i), y = w.u.y(j);
        double u = std::sin(2 * kPi * x) * std::cos(2 * kPi * y);
        double v = std::cos(2 * kPi * y) + 0.5 * std::sin(2 * kPi * x);
        double ux = 2 * kPi * std::cos(2 * kPi * x) * std::cos(2 * kPi * y);
        double uy = -2 * kPi * std::sin(2 * kPi * x) * std::sin(2 * kPi * y);
        err = std::max(err, std::abs(c.u(i, j) - (u * ux + v * uy)));
        x = w.v.x(i);
        y = w.v.y(j);
        u = std::sin(2 * kPi * x) * std::cos(2 * kPi * y);
        v = std::cos(2 * kPi * y) + 0.5 * std::sin(2 * kPi * x);
        const double vx = kPi * std::cos(2 * kPi * x);
        const double vy = -2 * kPi * std::sin(2 * kPi * y);
        err = std::max(err, std::abs(c.v(i, j) - (u * vx + v * vy)));
      }
    }
    return err;
  };
  const double e1 = error(32);
  const double e2 = error(64);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("reductions") {
  const GridSpec g(8, 2.0);
  EdgeVectorField w(g);
  for (double& v : w.u.data()) v = 3.0;
  for (double& v : w.v.data()) v = -4.0;
  CHECK(mean_flow(w).x == doctest::Approx(3.0));
  CHECK(mean_flow(w).y == doctest::Approx(-4.0));
  CHECK(max_speed(w) == doctest::Approx(5.0));
  CHECK(inner(w, w) == doctest::Approx(25.0 * 4.0));
  CHECK(all_finite(w));
  w.u(1, 1) = std::nan("");
  CHECK_FALSE(all_finite(w));
}
