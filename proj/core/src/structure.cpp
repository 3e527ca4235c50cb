#include "ibkit/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ibkit {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_markers(int m, int minimum, const char* what) {
  if (m < minimum) {
    throw std::invalid_argument(std::string(what) + " needs at least " + std::to_string(minimum) +
                                " points, got " + std::to_string(m));
  }
}

}  // namespace

Curve init_circle(Vec2 center, double r, int markers) {
  require_markers(markers, 4, "init_circle");
  if (!(r > 0.0)) throw std::invalid_argument("circle radius must be positive");
  Curve c;
  c.ds = kTwoPi / markers;
  c.X.resize(markers);
  for (int k = 0; k < markers; ++k) {
    const double s = k * c.ds;
    c.X[k] = {center.x + r * std::cos(s), center.y + r * std::sin(s)};
  }
  return c;
}

Curve init_perturbed_circle(double length, double r, double eps, int p, int markers) {
  require_markers(markers, 4, "init_perturbed_circle");
  if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in [0, 1)");
  if (p < 2) throw std::invalid_argument("mode p must be at least 2");
  Curve c;
  c.ds = kTwoPi / markers;
  c.X.resize(markers);
  const double mid = 0.5 * length;
  for (int k = 0; k < markers; ++k) {
    const double s = k * c.ds;
    const double rad = r * (1.0 + eps * std::cos(p * s));
    c.X[k] = {mid + rad * std::cos(s), mid + rad * std::sin(s)};
  }
  return c;
}

double perturbed_circle_area(double r, double eps, double p) {
  const double a = kTwoPi * p;
  return r * r * (a * (eps * eps + 2.0) + eps * std::sin(a) * (eps * std::cos(a) + 4.0)) / (4.0 * p);
}

int markers_for_mfac(double r, double mfac, double h) {
  if (!(mfac > 0.0) || !(h > 0.0) || !(r > 0.0)) {
    throw std::invalid_argument("markers_for_mfac needs positive r, mfac and h");
  }
  const long m = std::lround(kTwoPi * r / (mfac * h));
  return static_cast<int>(std::max(4L, m));
}

double SpringModel::kappa(double t) const { return kappa0 * (1.0 + 2.0 * tau * std::sin(omega0 * t)); }

std::vector<Vec2> spring_force(std::span<const Vec2> X, double ds, double kappa) {
  const int m = static_cast<int>(X.size());
  require_markers(m, 3, "spring_force");
  const double c = kappa / (ds * ds);
  std::vector<Vec2> F(m);
  for (int k = 0; k < m; ++k) {
    const Vec2& prev = X[(k + m - 1) % m];
    const Vec2& next = X[(k + 1) % m];
    F[k] = ((next - X[k]) + (prev - X[k])) * c;
  }
  return F;
}

// ---------------------------------------------------------------------------

std::vector<double> solve_cyclic_tridiagonal(double off, double diag, std::span<const double> rhs) {
  const int n = static_cast<int>(rhs.size());
  if (n < 3) throw std::invalid_argument("cyclic system needs at least 3 unknowns");

  // Sherman-Morrison: A = T + u v^T with T tridiagonal.
  const double gamma = -diag;
  std::vector<double> b(n, diag);
  b[0] = diag - gamma;
  b[n - 1] = diag - off * off / gamma;

  auto thomas = [&](std::vector<double> d) {
    std::vector<double> c(n);
    std::vector<double> x(n);
    double beta = b[0];
    x[0] = d[0] / beta;
    for (int i = 1; i < n; ++i) {
      c[i] = off / beta;
      beta = b[i] - off * c[i];
      x[i] = (d[i] - off * x[i - 1]) / beta;
    }
    for (int i = n - 2; i >= 0; --i) x[i] -= c[i + 1] * x[i + 1];
    return x;
  };

  std::vector<double> x = thomas(std::vector<double>(rhs.begin(), rhs.end()));
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = off;
  const std::vector<double> z = thomas(u);
  const double factor = (x[0] + off * x[n - 1] / gamma) / (1.0 + z[0] + off * z[n - 1] / gamma);
  for (int i = 0; i < n; ++i) x[i] -= factor * z[i];
  return x;
}

PeriodicCubicSpline::PeriodicCubicSpline(std::span<const double> values) : y_(values.begin(), values.end()) {
  const int n = static_cast<int>(y_.size());
  require_markers(n, 3, "PeriodicCubicSpline");
  std::vector<double> rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = 6.0 * (y_[(i + 1) % n] - 2.0 * y_[i] + y_[(i + n - 1) % n]);
  m_ = solve_cyclic_tridiagonal(1.0, 4.0, rhs);
}

namespace {

// Splits t into interval index and local coordinate in [0, 1).
std::pair<int, double> locate(double t, int n) {
  double w = std::fmod(t, static_cast<double>(n));
  if (w < 0) w += n;
  int i = static_cast<int>(std::floor(w));
  if (i >= n) i = n - 1;
  return {i, w - i};
}

}  // namespace

double PeriodicCubicSpline::operator()(double t) const {
  const int n = size();
  const auto [i, s] = locate(t, n);
  const int j = (i + 1) % n;
  const double r = 1.0 - s;
  return r * y_[i] + s * y_[j] + ((r * r * r - r) * m_[i] + (s * s * s - s) * m_[j]) / 6.0;
}

double PeriodicCubicSpline::derivative(double t) const {
  const int n = size();
  const auto [i, s] = locate(t, n);
  const int j = (i + 1) % n;
  const double r = 1.0 - s;
  return y_[j] - y_[i] + ((1.0 - 3.0 * r * r) * m_[i] + (3.0 * s * s - 1.0) * m_[j]) / 6.0;
}

double area_green(std::span<const Vec2> tracers) {
  const int n = static_cast<int>(tracers.size());
  require_markers(n, 8, "area_green");

  // Centering removes a large constant from X; the integral of Y' over a
  // period is exactly zero, so the area is unchanged.
  double cx = 0.0;
  double cy = 0.0;
  for (const Vec2& p : tracers) {
    cx += p.x;
    cy += p.y;
  }
  cx /= n;
  cy /= n;
  std::vector<double> xs(n);
  std::vector<double> ys(n);
  for (int k = 0; k < n; ++k) {
    xs[k] = tracers[k].x - cx;
    ys[k] = tracers[k].y - cy;
  }
  const PeriodicCubicSpline sx(xs);
  const PeriodicCubicSpline sy(ys);
  const std::vector<double>& mx = sx.moments();
  const std::vector<double>& my = sy.moments();

  // Three-point Gauss-Legendre on [0, 1]; exact for the degree-5 integrand.
  const double g = 0.5 * std::sqrt(0.6);
  const double nodes[3] = {0.5 - g, 0.5, 0.5 + g};
  const double weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

  double area = 0.0;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    double part = 0.0;
    for (int q = 0; q < 3; ++q) {
      const double s = nodes[q];
      const double r = 1.0 - s;
      const double x = r * xs[i] + s * xs[j] + ((r * r * r - r) * mx[i] + (s * s * s - s) * mx[j]) / 6.0;
      const double dy = ys[j] - ys[i] + ((1.0 - 3.0 * r * r) * my[i] + (3.0 * s * s - 1.0) * my[j]) / 6.0;
      part += weights[q] * x * dy;
    }
    area += part;
  }
  return area;
}

double relative_area_error(double initial, double area) {
  if (!(initial > 0.0)) throw std::invalid_argument("initial area must be positive");
  return std::abs(area - initial) / initial;
}

TracerSet select_tracers(const std::function<std::vector<Vec2>(int)>& generate, int markers,
                         double exact_area, double tol, int max_multiplier) {
  require_markers(markers, 1, "select_tracers");
  TracerSet t;
  for (int mult = 4;; mult *= 2) {
    t.X = generate(mult * markers);
    t.multiplier = mult;
    t.initial_rel_error = relative_area_error(exact_area, area_green(t.X));
    if (t.initial_rel_error <= tol || mult * 2 > max_multiplier) return t;
  }
}

AreaAudit::AreaAudit(double initial_area) : initial_(initial_area) {
  if (!(initial_area > 0.0)) throw std::invalid_argument("initial area must be positive");
}

double AreaAudit::record(double t, double area) {
  const double e = relative_area_error(initial_, area);
  samples_.push_back({t, area, e});
  return e;
}

double AreaAudit::mean_relative_error(double t0, double t1) const {
  double sum = 0.0;
  int count = 0;
  for (const AreaSample& s : samples_) {
    if (s.t >= t0 && s.t <= t1) {
      sum += s.rel_error;
      ++count;
    }
  }
  return count > 0 ? sum / count : 0.0;
}

double AreaAudit::max_relative_error() const {
  double m = 0.0;
  for (const AreaSample& s : samples_) m = std::max(m, s.rel_error);
  return m;
}

ForceErrors force_error_norms(std::span<const Vec2> F, double ds, double kappa, double r) {
  ForceErrors e;
  e.pointwise.resize(F.size());
  double sq = 0.0;
  for (std::size_t k = 0; k < F.size(); ++k) {
    const double s = static_cast<double>(k) * ds;
    const Vec2 exact{-kappa * r * std::cos(s), -kappa * r * std::sin(s)};
    const Vec2 d = F[k] - exact;
    e.pointwise[k] = norm(d);
    sq += dot(d, d);
  }
  e.l2 = ds * std::sqrt(sq);
  return e;
}

}  // namespace ibkit
