#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibkit/grid.hpp"
#include "ibkit/kernels.hpp"
#include "ibkit/spectral.hpp"
#include "ibkit/vec2.hpp"

namespace ibkit {

// Standard (local) IB transfer. Each velocity component uses its own
// composite kernel orientation; spreading is the exact adjoint of
// interpolation: <w, S F> h^2 = sum_k (J w)_k . F_k ds.

std::vector<Vec2> ib_interpolate(const EdgeVectorField& w, std::span<const Vec2> markers,
                                 const CompositeDelta& delta);

EdgeVectorField ib_spread(std::span<const Vec2> forces, std::span<const Vec2> markers, double ds,
                          const CompositeDelta& delta, const GridSpec& grid);

/// Analytic divergence dU/dX + dV/dY of the standard interpolant at `point`.
double ib_interpolant_divergence(const EdgeVectorField& w, Vec2 point, const CompositeDelta& delta);

/// Thrown when DFIB interpolation receives a field that is not discretely
/// divergence-free.
class NotDivergenceFree : public std::domain_error {
 public:
  explicit NotDivergenceFree(double max_div);
  double max_divergence() const { return max_div_; }

 private:
  double max_div_;
};

// Non-local divergence-free IB transfer on the periodic grid.

/// Mean-zero nodal potential a with perp_grad(a) + mean_flow(w) = w.
/// Requires max|div w| <= 1e-10 max|w| / h.
NodeField dfib_potential(const EdgeVectorField& w, const SpectralSolver& solver);

/// u0 + sum_n a_n grad_perp_X[delta_h(x_n - X)] h^2 at each marker.
std::vector<Vec2> dfib_interpolate(const EdgeVectorField& w, std::span<const Vec2> markers,
                                   const Kernel1D& kernel, const SpectralSolver& solver);

/// Nodal field R = sum_k grad(delta_h)(x_n - X_k) x F_k ds.
NodeField dfib_force_curl(std::span<const Vec2> forces, std::span<const Vec2> markers, double ds,
                          const Kernel1D& kernel, const GridSpec& grid);

/// Divergence-free Eulerian force with curl(f) = R and mean sum F_k ds / |Omega|.
EdgeVectorField dfib_spread(std::span<const Vec2> forces, std::span<const Vec2> markers, double ds,
                            const Kernel1D& kernel, const SpectralSolver& solver);

/// Divergence of the continuous DFIB interpolant built from potential `a`,
/// evaluated from analytic mixed partials.
double dfib_interpolant_divergence(const NodeField& a, Vec2 point, const Kernel1D& kernel);

enum class CouplingMethod { StandardIB, DFIB };

/// Interpolation/spreading pair bound to a grid. Immutable after construction.
class CouplingScheme {
 public:
  static CouplingScheme standard(const CompositeDelta& delta, const GridSpec& grid);
  /// Throws std::invalid_argument unless `kernel` is at least C^2.
  static CouplingScheme dfib(const Kernel1D& kernel, std::shared_ptr<const SpectralSolver> solver);

  CouplingMethod method() const { return method_; }
  const CompositeDelta& delta() const { return delta_; }
  const GridSpec& grid() const { return grid_; }
  /// "dfib" for the non-local scheme, otherwise the kernel name.
  std::string name() const;

  std::vector<Vec2> interpolate(const EdgeVectorField& w, std::span<const Vec2> markers) const;
  EdgeVectorField spread(std::span<const Vec2> forces, std::span<const Vec2> markers, double ds) const;

 private:
  CouplingScheme(CouplingMethod m, CompositeDelta d, GridSpec g, std::shared_ptr<const SpectralSolver> s)
      : method_(m), delta_(d), grid_(g), solver_(std::move(s)) {}

  CouplingMethod method_;
  CompositeDelta delta_;
  GridSpec grid_;
  std::shared_ptr<const SpectralSolver> solver_;
};

}  // namespace ibkit
