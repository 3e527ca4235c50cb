#pragma once

#include <memory>
#include <stdexcept>

#include "ibkit/grid.hpp"

namespace ibkit {

/// Thrown when a periodic Poisson right-hand side has a nonzero mean.
class IncompatibleRhs : public std::domain_error {
 public:
  IncompatibleRhs(double mean, double scale);
  double mean() const { return mean_; }

 private:
  double mean_;
};

struct StokesResult {
  EdgeVectorField u;
  CellField p;
};

/// Exact per-wavenumber solvers for the periodic MAC stencils.
///
/// Every printed stencil is a polynomial in the periodic shift operators, so
/// the 2D DFT diagonalizes them. Plans are created once; execution is const
/// and uses call-local buffers, so one solver can be shared across threads.
class SpectralSolver {
 public:
  explicit SpectralSolver(const GridSpec& grid);
  ~SpectralSolver();
  SpectralSolver(SpectralSolver&&) noexcept;
  SpectralSolver& operator=(SpectralSolver&&) noexcept;
  SpectralSolver(const SpectralSolver&) = delete;
  SpectralSolver& operator=(const SpectralSolver&) = delete;

  const GridSpec& grid() const;

  /// Mean-zero phi with laplacian(phi) = rhs - mean(rhs). Throws
  /// IncompatibleRhs when |mean(rhs)| > 1e-10 * max|rhs|.
  template <Centering C>
  Field<C> poisson_solve(const Field<C>& rhs) const;

  /// Crank-Nicolson Stokes update with exact projection:
  ///   rho((u1 - u0)/dt + adv) = -grad p + (mu/2) lap(u1 + u0) + f,  div u1 = 0.
  /// The returned pressure has zero mean.
  StokesResult stokes_step(const EdgeVectorField& u0, const EdgeVectorField& f,
                           const EdgeVectorField& adv, double rho, double mu, double dt) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ibkit
