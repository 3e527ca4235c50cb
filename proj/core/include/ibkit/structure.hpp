#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ibkit/vec2.hpp"

namespace ibkit {

/// Closed Lagrangian curve sampled at s_k = k ds, ds = 2 pi / M.
struct Curve {
  std::vector<Vec2> X;
  double ds = 0.0;
  double mfac = 0.0;  // initial physical spacing over h; informational

  int size() const { return static_cast<int>(X.size()); }
  double s(int k) const { return k * ds; }
};

/// Counterclockwise circle with M >= 4 markers starting at angle 0.
Curve init_circle(Vec2 center, double r, int markers);

/// Circle of radius profile r (1 + eps cos(p s)) centered at (L/2, L/2).
Curve init_perturbed_circle(double length, double r, double eps, int p, int markers);

/// Area enclosed by the perturbed circle for any integer or non-integer mode p.
double perturbed_circle_area(double r, double eps, double p);

/// M = round(2 pi r / (mfac h)), at least 4.
int markers_for_mfac(double r, double mfac, double h);

/// Spring stiffness kappa(t) = kappa0 (1 + 2 tau sin(omega0 t)).
struct SpringModel {
  double kappa0 = 1.0;
  double tau = 0.0;
  double omega0 = 0.0;

  double kappa(double t) const;
};

/// F_k = kappa / ds^2 (X_{k+1} + X_{k-1} - 2 X_k), indices modulo M.
std::vector<Vec2> spring_force(std::span<const Vec2> X, double ds, double kappa);

/// Interpolating cubic spline through equispaced periodic samples y_k at
/// t = k, k = 0..n-1, with period n.
class PeriodicCubicSpline {
 public:
  explicit PeriodicCubicSpline(std::span<const double> values);

  int size() const { return static_cast<int>(y_.size()); }
  double operator()(double t) const;
  double derivative(double t) const;
  /// Second derivatives at the knots.
  const std::vector<double>& moments() const { return m_; }

 private:
  std::vector<double> y_;
  std::vector<double> m_;
};

/// Solves the cyclic tridiagonal system with constant diagonals (a, b, a).
std::vector<double> solve_cyclic_tridiagonal(double off, double diag, std::span<const double> rhs);

/// Enclosed area from integral of X dY/ds along periodic cubic splines.
/// Positive for counterclockwise curves. Requires at least 8 points.
double area_green(std::span<const Vec2> tracers);

double relative_area_error(double initial, double area);

struct TracerSet {
  std::vector<Vec2> X;
  int multiplier = 0;
  double initial_rel_error = 0.0;
};

/// Starting at 4x `markers`, doubles the tracer count until the computed
/// initial area is within `tol` of `exact_area` (cap 64x). `generate(n)`
/// returns n points on the initial curve.
TracerSet select_tracers(const std::function<std::vector<Vec2>(int)>& generate, int markers,
                         double exact_area, double tol = 1e-13, int max_multiplier = 64);

struct AreaSample {
  double t;
  double area;
  double rel_error;
};

/// Time series of relative area errors against the exact initial area.
class AreaAudit {
 public:
  explicit AreaAudit(double initial_area);

  double initial_area() const { return initial_; }
  /// Records a sample and returns its relative error.
  double record(double t, double area);
  const std::vector<AreaSample>& samples() const { return samples_; }
  /// Arithmetic mean over samples with t in [t0, t1].
  double mean_relative_error(double t0, double t1) const;
  double max_relative_error() const;

 private:
  double initial_;
  std::vector<AreaSample> samples_;
};

struct ForceErrors {
  std::vector<double> pointwise;
  double l2 = 0.0;  // ds * sqrt(sum |F_k - F_exact|^2)
};

/// Errors against the equilibrium circle force -kappa r n(s_k).
ForceErrors force_error_norms(std::span<const Vec2> F, double ds, double kappa, double r);

}  // namespace ibkit
