#include "ibkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ibkit {
namespace {

constexpr int kMaxBSplineOrder = kMaxStencil - 1;

// Cardinal B-spline table: out[m] = N_n(t + m) for m = 0..n-1, t in [0, 1),
// where N_n is the uncentered B-spline on knots 0..n. Built with the uniform
// Cox-de Boor recurrence
//   N_k(y) = (y N_{k-1}(y) + (k - y) N_{k-1}(y - 1)) / (k - 1).
// When `lower` is non-null it receives the order n-1 table.
template <int N>
void bspline_table_fixed(double t, double* out, double* lower) {
  // In place, highest index first, so cur[m - 1] still holds the previous order.
  double cur[kMaxStencil] = {1.0};
  for (int k = 2; k <= N; ++k) {
    if (k == N && lower != nullptr) std::copy(cur, cur + (k - 1), lower);
    const double inv = 1.0 / (k - 1);
    cur[k - 1] = (1.0 - t) * cur[k - 2] * inv;
    for (int m = k - 2; m >= 1; --m) cur[m] = ((t + m) * cur[m] + (k - t - m) * cur[m - 1]) * inv;
    cur[0] = t * cur[0] * inv;
  }
  std::copy(cur, cur + N, out);
}

void bspline_table(int n, double t, double* out, double* lower = nullptr) {
  switch (n) {
    case 1: return bspline_table_fixed<1>(t, out, lower);
    case 2: return bspline_table_fixed<2>(t, out, lower);
    case 3: return bspline_table_fixed<3>(t, out, lower);
    case 4: return bspline_table_fixed<4>(t, out, lower);
    case 5: return bspline_table_fixed<5>(t, out, lower);
    case 6: return bspline_table_fixed<6>(t, out, lower);
    case 7: return bspline_table_fixed<7>(t, out, lower);
    default: throw std::invalid_argument("unsupported B-spline order " + std::to_string(n));
  }
}

void check_order(int n, int min_order) {
  if (n < min_order) {
    throw std::invalid_argument("B-spline order must be >= " + std::to_string(min_order) +
                                ", got " + std::to_string(n));
  }
  if (n > kMaxBSplineOrder) {
    throw std::invalid_argument("B-spline order above " + std::to_string(kMaxBSplineOrder) +
                                " is not supported");
  }
}

double bspline_eval_unchecked(int n, double r) {
  const double y = r + 0.5 * n;
  if (!(y >= 0.0) || y >= n) return 0.0;
  const double fl = std::floor(y);
  const int idx = static_cast<int>(fl);
  std::array<double, kMaxStencil> tab{};
  bspline_table(n, y - fl, tab.data());
  return tab[idx];
}

// Six-point kernel with three continuous derivatives. For r in [0, 1] the six
// nonzero values phi(r - 3), ..., phi(r + 2) follow from the moment
// conditions plus a constant sum of squares, which leaves one quadratic.
constexpr double kIb6Alpha = 28.0;
const double kIb6K = 59.0 / 60.0 - std::sqrt(29.0) / 20.0;

void ib6_values(double r, double* v, double* dv) {
  const double K = kIb6K;
  const double r2 = r * r;
  const double r3 = r2 * r;
  const double beta = 9.0 / 4.0 - 1.5 * (K + r2) + (22.0 / 3.0 - 7.0 * K) * r - 7.0 / 3.0 * r3;
  const double q1 = (3.0 * K - 1.0) * r + r3;
  const double q2 = (4.0 - 3.0 * K) * r - r3;
  const double gamma =
      -11.0 / 32.0 * r2 + 3.0 / 32.0 * (2.0 * K + r2) * r2 + q1 * q1 / 72.0 + q2 * q2 / 18.0;
  const double disc = beta * beta - 4.0 * kIb6Alpha * gamma;
  const double root = std::sqrt(disc);
  const double pm3 = (-beta + root) / (2.0 * kIb6Alpha);

  v[0] = pm3;
  v[1] = -3.0 * pm3 - 1.0 / 16.0 + (K + r2) / 8.0 + (3.0 * K - 1.0) * r / 12.0 + r3 / 12.0;
  v[2] = 2.0 * pm3 + 0.25 + (4.0 - 3.0 * K) * r / 6.0 - r3 / 6.0;
  v[3] = 2.0 * pm3 + 5.0 / 8.0 - (K + r2) / 4.0;
  v[4] = -3.0 * pm3 + 0.25 - (4.0 - 3.0 * K) * r / 6.0 + r3 / 6.0;
  v[5] = pm3 - 1.0 / 16.0 + (K + r2) / 8.0 - (3.0 * K - 1.0) * r / 12.0 - r3 / 12.0;

  if (dv == nullptr) return;
  const double dbeta = -3.0 * r + (22.0 / 3.0 - 7.0 * K) - 7.0 * r2;
  const double dq1 = (3.0 * K - 1.0) + 3.0 * r2;
  const double dq2 = (4.0 - 3.0 * K) - 3.0 * r2;
  const double dgamma = -11.0 / 16.0 * r + 3.0 / 8.0 * (K * r + r3) + q1 * dq1 / 36.0 + q2 * dq2 / 9.0;
  const double ddisc = 2.0 * beta * dbeta - 4.0 * kIb6Alpha * dgamma;
  const double dpm3 = (-dbeta + ddisc / (2.0 * root)) / (2.0 * kIb6Alpha);

  dv[0] = dpm3;
  dv[1] = -3.0 * dpm3 + r / 4.0 + (3.0 * K - 1.0) / 12.0 + r2 / 4.0;
  dv[2] = 2.0 * dpm3 + (4.0 - 3.0 * K) / 6.0 - r2 / 2.0;
  dv[3] = 2.0 * dpm3 - r / 2.0;
  dv[4] = -3.0 * dpm3 - (4.0 - 3.0 * K) / 6.0 + r2 / 2.0;
  dv[5] = dpm3 + r / 4.0 - (3.0 * K - 1.0) / 12.0 - r2 / 4.0;
}

double ib4_eval(double r) {
  const double a = std::abs(r);
  if (a < 1.0) return (3.0 - 2.0 * a + std::sqrt(1.0 + 4.0 * a - 4.0 * a * a)) / 8.0;
  if (a < 2.0) return (5.0 - 2.0 * a - std::sqrt(-7.0 + 12.0 * a - 4.0 * a * a)) / 8.0;
  return 0.0;
}

double ib4_deriv(double r) {
  const double a = std::abs(r);
  double d = 0.0;
  if (a < 1.0) {
    d = (-2.0 + (2.0 - 4.0 * a) / std::sqrt(1.0 + 4.0 * a - 4.0 * a * a)) / 8.0;
  } else if (a < 2.0) {
    d = (-2.0 - (6.0 - 4.0 * a) / std::sqrt(-7.0 + 12.0 * a - 4.0 * a * a)) / 8.0;
  }
  return r < 0.0 ? -d : d;
}

double ib6_eval(double r, bool derivative) {
  const double fl = std::floor(r);
  if (fl < -3.0 || fl > 2.0) return 0.0;
  std::array<double, 6> v{};
  std::array<double, 6> dv{};
  ib6_values(r - fl, v.data(), derivative ? dv.data() : nullptr);
  const int idx = static_cast<int>(fl) + 3;
  return derivative ? dv[idx] : v[idx];
}

}  // namespace

double bspline_eval(int n, double r) {
  check_order(n, 1);
  return bspline_eval_unchecked(n, r);
}

double bspline_deriv(int n, double r) {
  check_order(n, 2);
  return bspline_eval_unchecked(n - 1, r + 0.5) - bspline_eval_unchecked(n - 1, r - 0.5);
}

double ib_kernel_eval(KernelFamily which, double r) {
  switch (which) {
    case KernelFamily::IB4:
      return ib4_eval(r);
    case KernelFamily::IB6:
      return ib6_eval(r, false);
    case KernelFamily::BSpline:
      break;
  }
  throw std::invalid_argument("ib_kernel_eval: not an IB kernel");
}

double ib_kernel_deriv(KernelFamily which, double r) {
  switch (which) {
    case KernelFamily::IB4:
      return ib4_deriv(r);
    case KernelFamily::IB6:
      return ib6_eval(r, true);
    case KernelFamily::BSpline:
      break;
  }
  throw std::invalid_argument("ib_kernel_deriv: not an IB kernel");
}

// ---------------------------------------------------------------------------

Kernel1D Kernel1D::bspline(int order) {
  check_order(order, 1);
  return Kernel1D(KernelFamily::BSpline, order);
}
Kernel1D Kernel1D::ib4() { return Kernel1D(KernelFamily::IB4, 0); }
Kernel1D Kernel1D::ib6() { return Kernel1D(KernelFamily::IB6, 0); }

double Kernel1D::support_half_width() const {
  switch (family_) {
    case KernelFamily::BSpline:
      return 0.5 * order_;
    case KernelFamily::IB4:
      return 2.0;
    case KernelFamily::IB6:
      return 3.0;
  }
  return 0.0;
}

int Kernel1D::smoothness() const {
  switch (family_) {
    case KernelFamily::BSpline:
      return order_ - 2;
    case KernelFamily::IB4:
      return 1;
    case KernelFamily::IB6:
      return 3;
  }
  return -1;
}

double Kernel1D::operator()(double r) const {
  if (family_ == KernelFamily::BSpline) return bspline_eval_unchecked(order_, r);
  return ib_kernel_eval(family_, r);
}

double Kernel1D::derivative(double r) const {
  if (family_ == KernelFamily::BSpline) return bspline_deriv(order_, r);
  return ib_kernel_deriv(family_, r);
}

Stencil1D Kernel1D::stencil(double s, bool with_derivative) const {
  Stencil1D st;
  switch (family_) {
    case KernelFamily::BSpline: {
      const double a = s - 0.5 * order_;
      const double first = std::ceil(a);
      st.first = static_cast<int>(first);
      st.count = order_;
      const double t = first - a;
      if (with_derivative && order_ >= 2) {
        std::array<double, kMaxStencil> lower{};
        bspline_table(order_, t, st.value.data(), lower.data());
        for (int m = 0; m < order_; ++m) {
          const double hi = m <= order_ - 2 ? lower[m] : 0.0;
          const double lo = m >= 1 ? lower[m - 1] : 0.0;
          st.deriv[m] = hi - lo;
        }
      } else {
        // BS_1 has a zero derivative almost everywhere.
        bspline_table(order_, t, st.value.data());
      }
      break;
    }
    case KernelFamily::IB6: {
      const double first = std::ceil(s - 3.0);
      st.first = static_cast<int>(first);
      st.count = 6;
      ib6_values(first - s + 3.0, st.value.data(), with_derivative ? st.deriv.data() : nullptr);
      break;
    }
    case KernelFamily::IB4: {
      const double first = std::ceil(s - 2.0);
      st.first = static_cast<int>(first);
      st.count = 4;
      for (int m = 0; m < 4; ++m) {
        const double r = first + m - s;
        st.value[m] = ib4_eval(r);
        if (with_derivative) st.deriv[m] = ib4_deriv(r);
      }
      break;
    }
  }
  return st;
}

std::string Kernel1D::name() const {
  switch (family_) {
    case KernelFamily::BSpline:
      return "bs" + std::to_string(order_);
    case KernelFamily::IB4:
      return "ib4";
    case KernelFamily::IB6:
      return "ib6";
  }
  return {};
}

// ---------------------------------------------------------------------------

CompositeDelta CompositeDelta::composite(int k, double h) {
  if (k < 1) throw std::invalid_argument("composite B-spline pair needs k >= 1");
  return CompositeDelta{Kernel1D::bspline(k + 1), Kernel1D::bspline(k), h};
}

CompositeDelta CompositeDelta::isotropic(Kernel1D kernel, double h) {
  return CompositeDelta{kernel, kernel, h};
}

double CompositeDelta::max_half_width() const {
  return std::max(normal.support_half_width(), tangential.support_half_width());
}

std::string CompositeDelta::name() const {
  if (is_isotropic()) return normal.name();
  return normal.name() + tangential.name();
}

double delta_weight(const CompositeDelta& delta, Component component, double dx, double dy) {
  const double inv_h = 1.0 / delta.h;
  return delta.x_kernel(component)(dx * inv_h) * delta.y_kernel(component)(dy * inv_h) * inv_h *
         inv_h;
}

PerpGradient delta_perp_gradient(const Kernel1D& kernel, double dx, double dy, double h) {
  if (kernel.smoothness() < 2) {
    throw std::invalid_argument("kernel " + kernel.name() +
                                " is not C^2; perpendicular gradients need C^2 kernels");
  }
  const double rx = dx / h;
  const double ry = dy / h;
  const double inv_h3 = 1.0 / (h * h * h);
  const double ddx = kernel.derivative(rx) * kernel(ry) * inv_h3;
  const double ddy = kernel(rx) * kernel.derivative(ry) * inv_h3;
  return {-ddy, ddx};
}

namespace {
constexpr std::array<std::string_view, 7> kKernelNames = {"bs2bs1", "bs3bs2", "bs4bs3", "bs5bs4",
                                                          "bs6bs5", "ib4",    "ib6"};
}

std::span<const std::string_view> kernel_names() { return kKernelNames; }

CompositeDelta parse_kernel(std::string_view name, double h) {
  if (name == "ib4") return CompositeDelta::isotropic(Kernel1D::ib4(), h);
  if (name == "ib6") return CompositeDelta::isotropic(Kernel1D::ib6(), h);
  for (int k = 1; k <= 5; ++k) {
    if (name == kKernelNames[k - 1]) return CompositeDelta::composite(k, h);
  }
  throw std::invalid_argument("unknown kernel '" + std::string(name) +
                              "' (expected bs2bs1..bs6bs5, ib4 or ib6)");
}

}  // namespace ibkit
