#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace ibkit {

enum class KernelFamily { BSpline, IB4, IB6 };

/// Largest number of grid points any supported kernel touches in one direction.
inline constexpr int kMaxStencil = 8;

/// Centered cardinal B-spline BS_n evaluated at r. Zero outside (-n/2, n/2);
/// BS_1 uses the half-open convention BS_1(-1/2) = 1, BS_1(1/2) = 0.
/// Throws std::invalid_argument for n < 1.
double bspline_eval(int n, double r);

/// Derivative of BS_n through the central-difference identity
/// BS_{n-1}(r + 1/2) - BS_{n-1}(r - 1/2). Throws std::invalid_argument for n < 2.
double bspline_deriv(int n, double r);

/// Peskin's four-point kernel (family IB4) or the C^3 six-point kernel (IB6).
/// Throws std::invalid_argument when `which` is BSpline.
double ib_kernel_eval(KernelFamily which, double r);

/// Analytic derivative of an IB kernel. IB4 is only C^1, so callers that need
/// two continuous derivatives must check Kernel1D::smoothness() themselves.
double ib_kernel_deriv(KernelFamily which, double r);

/// Weights of a 1D kernel on the integer lattice around a point.
///
/// For a point at lattice coordinate `s`, entry m holds phi(first + m - s)
/// (and its derivative with respect to the argument). Entries past `count`
/// are zero.
struct Stencil1D {
  int first = 0;
  int count = 0;
  std::array<double, kMaxStencil> value{};
  std::array<double, kMaxStencil> deriv{};
};

/// One-dimensional regularized-delta building block. Immutable value type.
class Kernel1D {
 public:
  static Kernel1D bspline(int order);
  static Kernel1D ib4();
  static Kernel1D ib6();

  KernelFamily family() const { return family_; }
  int order() const { return order_; }
  double support_half_width() const;
  /// Number of continuous derivatives; -1 for the discontinuous BS_1.
  int smoothness() const;

  double operator()(double r) const;
  /// d/dr of the kernel. Throws std::invalid_argument for BS_1.
  double derivative(double r) const;

  /// Values on the lattice around `s`. Derivatives are filled only when
  /// `with_derivative` is set.
  Stencil1D stencil(double s, bool with_derivative = false) const;

  std::string name() const;

  friend bool operator==(const Kernel1D&, const Kernel1D&) = default;

 private:
  Kernel1D(KernelFamily f, int order) : family_(f), order_(order) {}

  KernelFamily family_;
  int order_;
};

enum class Component { X, Y };

/// Tensor-product regularized delta delta_h(x) = phi(x/h) psi(y/h) / h^2.
///
/// For the x component phi is the normal kernel and psi the tangential one;
/// the roles swap for the y component. Isotropic deltas use one kernel for
/// both.
struct CompositeDelta {
  Kernel1D normal;
  Kernel1D tangential;
  double h;

  static CompositeDelta composite(int k, double h);  // BS_{k+1} BS_k
  static CompositeDelta isotropic(Kernel1D kernel, double h);

  bool is_isotropic() const { return normal == tangential; }
  /// Name in the CLI vocabulary ("bs4bs3", "ib4", ...).
  std::string name() const;
  const Kernel1D& x_kernel(Component c) const { return c == Component::X ? normal : tangential; }
  const Kernel1D& y_kernel(Component c) const { return c == Component::X ? tangential : normal; }
  double max_half_width() const;
};

/// delta_h weight for the given velocity component at offset (dx, dy).
double delta_weight(const CompositeDelta& delta, Component component, double dx, double dy);

/// (-d/dy, d/dx) of the isotropic delta built from `kernel`, evaluated at
/// offset (dx, dy). Requires a kernel with at least two continuous
/// derivatives; throws std::invalid_argument otherwise.
struct PerpGradient {
  double x;
  double y;
};
PerpGradient delta_perp_gradient(const Kernel1D& kernel, double dx, double dy, double h);

/// Parses "bs2bs1" ... "bs6bs5", "ib4", "ib6". Throws std::invalid_argument.
CompositeDelta parse_kernel(std::string_view name, double h);

/// All accepted kernel names, in ascending regularity.
std::span<const std::string_view> kernel_names();

}  // namespace ibkit
