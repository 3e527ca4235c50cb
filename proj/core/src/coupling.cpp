#include "ibkit/coupling.hpp"

#include <cmath>
#include <sstream>

namespace ibkit {
namespace {

// Lattice coordinates of a point relative to a centering: grid entry i sits at
// (i + offset) h, so the kernel argument for entry i is i - s.
double lattice_coord(double x, double h, double offset) { return x / h - offset; }

// Calls f(a, b, flat_index) over the tensor stencil with periodic wrapping
// resolved once per row and column.
template <typename F>
void for_stencil(const GridSpec& g, const Stencil1D& sx, const Stencil1D& sy, F&& f) {
  std::size_t row[kMaxStencil];
  std::size_t col[kMaxStencil];
  const std::size_t n = static_cast<std::size_t>(g.n());
  for (int a = 0; a < sx.count; ++a) row[a] = static_cast<std::size_t>(g.wrap(sx.first + a)) * n;
  for (int b = 0; b < sy.count; ++b) col[b] = static_cast<std::size_t>(g.wrap(sy.first + b));
  for (int a = 0; a < sx.count; ++a) {
    for (int b = 0; b < sy.count; ++b) f(a, b, row[a] + col[b]);
  }
}

std::string describe_div(double d) {
  std::ostringstream os;
  os << "velocity field is not discretely divergence-free (max |div| = " << d << ")";
  return os.str();
}

}  // namespace

std::vector<Vec2> ib_interpolate(const EdgeVectorField& w, std::span<const Vec2> markers,
                                 const CompositeDelta& delta) {
  const double h = delta.h;
  const Kernel1D& ux = delta.x_kernel(Component::X);
  const Kernel1D& uy = delta.y_kernel(Component::X);
  const Kernel1D& vx = delta.x_kernel(Component::Y);
  const Kernel1D& vy = delta.y_kernel(Component::Y);

  const GridSpec& g = w.grid();
  std::vector<Vec2> out(markers.size());
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const Vec2 X = markers[k];
    {
      const Stencil1D sx = ux.stencil(lattice_coord(X.x, h, 0.0));
      const Stencil1D sy = uy.stencil(lattice_coord(X.y, h, 0.5));
      double acc = 0.0;
      const double* u = w.u.data().data();
      for_stencil(g, sx, sy, [&](int a, int b, std::size_t idx) { acc += u[idx] * sx.value[a] * sy.value[b]; });
      out[k].x = acc;
    }
    {
      const Stencil1D sx = vx.stencil(lattice_coord(X.x, h, 0.5));
      const Stencil1D sy = vy.stencil(lattice_coord(X.y, h, 0.0));
      double acc = 0.0;
      const double* v = w.v.data().data();
      for_stencil(g, sx, sy, [&](int a, int b, std::size_t idx) { acc += v[idx] * sx.value[a] * sy.value[b]; });
      out[k].y = acc;
    }
  }
  return out;
}

EdgeVectorField ib_spread(std::span<const Vec2> forces, std::span<const Vec2> markers, double ds,
                          const CompositeDelta& delta, const GridSpec& grid) {
  const double h = delta.h;
  const double scale = ds / (h * h);
  const Kernel1D& ux = delta.x_kernel(Component::X);
  const Kernel1D& uy = delta.y_kernel(Component::X);
  const Kernel1D& vx = delta.x_kernel(Component::Y);
  const Kernel1D& vy = delta.y_kernel(Component::Y);

  EdgeVectorField f(grid);
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const Vec2 X = markers[k];
    const Vec2 F = forces[k] * scale;
    {
      const Stencil1D sx = ux.stencil(lattice_coord(X.x, h, 0.0));
      const Stencil1D sy = uy.stencil(lattice_coord(X.y, h, 0.5));
      double* u = f.u.data().data();
      for_stencil(grid, sx, sy, [&](int a, int b, std::size_t idx) { u[idx] += F.x * sx.value[a] * sy.value[b]; });
    }
    {
      const Stencil1D sx = vx.stencil(lattice_coord(X.x, h, 0.5));
      const Stencil1D sy = vy.stencil(lattice_coord(X.y, h, 0.0));
      double* v = f.v.data().data();
      for_stencil(grid, sx, sy, [&](int a, int b, std::size_t idx) { v[idx] += F.y * sx.value[a] * sy.value[b]; });
    }
  }
  return f;
}

double ib_interpolant_divergence(const EdgeVectorField& w, Vec2 point, const CompositeDelta& delta) {
  const double h = delta.h;
  double dudx = 0.0;
  {
    const Stencil1D sx = delta.x_kernel(Component::X).stencil(lattice_coord(point.x, h, 0.0), true);
    const Stencil1D sy = delta.y_kernel(Component::X).stencil(lattice_coord(point.y, h, 0.5));
    for (int a = 0; a < sx.count; ++a) {
      for (int b = 0; b < sy.count; ++b) {
        dudx += w.u(sx.first + a, sy.first + b) * sx.deriv[a] * sy.value[b];
      }
    }
  }
  double dvdy = 0.0;
  {
    const Stencil1D sx = delta.x_kernel(Component::Y).stencil(lattice_coord(point.x, h, 0.5));
    const Stencil1D sy = delta.y_kernel(Component::Y).stencil(lattice_coord(point.y, h, 0.0), true);
    for (int a = 0; a < sx.count; ++a) {
      for (int b = 0; b < sy.count; ++b) {
        dvdy += w.v(sx.first + a, sy.first + b) * sx.value[a] * sy.deriv[b];
      }
    }
  }
  // d/dX phi(i - X/h) = -phi'/h
  return -(dudx + dvdy) / h;
}

// ---------------------------------------------------------------------------

NotDivergenceFree::NotDivergenceFree(double max_div)
    : std::domain_error(describe_div(max_div)), max_div_(max_div) {}

NodeField dfib_potential(const EdgeVectorField& w, const SpectralSolver& solver) {
  const double h = w.grid().h();
  const double max_div = max_abs(div(w));
  if (max_div > 1e-10 * max_abs(w) / h) throw NotDivergenceFree(max_div);
  // curl(perp_grad a) = lap a, and the mean flow is invisible to curl.
  NodeField c = curl(w);
  c -= NodeField(c.grid(), mean(c));  // telescopes to zero; drop the roundoff
  return solver.poisson_solve(c);
}

namespace {

std::vector<Vec2> dfib_interpolate_potential(const NodeField& a, Vec2 u0, std::span<const Vec2> markers,
                                             const Kernel1D& kernel) {
  const double h = a.grid().h();
  std::vector<Vec2> out(markers.size());
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const Stencil1D sx = kernel.stencil(lattice_coord(markers[k].x, h, 0.0), true);
    const Stencil1D sy = kernel.stencil(lattice_coord(markers[k].y, h, 0.0), true);
    // grad_X of phi(i - X/h) phi(j - Y/h) = -(phi'_x phi_y, phi_x phi'_y) / h
    double d_dy = 0.0;
    double d_dx = 0.0;
    const double* ad = a.data().data();
    for_stencil(a.grid(), sx, sy, [&](int i, int j, std::size_t idx) {
      d_dy += ad[idx] * sx.value[i] * sy.deriv[j];
      d_dx += ad[idx] * sx.deriv[i] * sy.value[j];
    });
    // U = u0 + (-dA/dY, dA/dX)
    out[k] = {u0.x + d_dy / h, u0.y - d_dx / h};
  }
  return out;
}

void require_c2(const Kernel1D& kernel) {
  if (kernel.smoothness() < 2) {
    throw std::invalid_argument("DFIB requires C^2 kernel; " + kernel.name() + " is C^" +
                                std::to_string(kernel.smoothness()));
  }
}

}  // namespace

std::vector<Vec2> dfib_interpolate(const EdgeVectorField& w, std::span<const Vec2> markers,
                                   const Kernel1D& kernel, const SpectralSolver& solver) {
  require_c2(kernel);
  const NodeField a = dfib_potential(w, solver);
  return dfib_interpolate_potential(a, mean_flow(w), markers, kernel);
}

NodeField dfib_force_curl(std::span<const Vec2> forces, std::span<const Vec2> markers, double ds,
                          const Kernel1D& kernel, const GridSpec& grid) {
  require_c2(kernel);
  const double h = grid.h();
  const double scale = ds / (h * h * h);
  NodeField r(grid);
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const Stencil1D sx = kernel.stencil(lattice_coord(markers[k].x, h, 0.0), true);
    const Stencil1D sy = kernel.stencil(lattice_coord(markers[k].y, h, 0.0), true);
    const Vec2 F = forces[k] * scale;
    double* rd = r.data().data();
    // (d/dx delta) F_y - (d/dy delta) F_x, derivatives in the argument x_n - X
    for_stencil(grid, sx, sy, [&](int i, int j, std::size_t idx) {
      rd[idx] += sx.deriv[i] * sy.value[j] * F.y - sx.value[i] * sy.deriv[j] * F.x;
    });
  }
  return r;
}

EdgeVectorField dfib_spread(std::span<const Vec2> forces, std::span<const Vec2> markers, double ds,
                            const Kernel1D& kernel, const SpectralSolver& solver) {
  const GridSpec& grid = solver.grid();
  NodeField r = dfib_force_curl(forces, markers, ds, kernel, grid);
  // Kernel derivatives sum to zero over the lattice, so mean(R) is pure roundoff.
  r -= NodeField(grid, mean(r));
  EdgeVectorField f = perp_grad(solver.poisson_solve(r));

  Vec2 total{};
  for (const Vec2& F : forces) total += F;
  const double area = grid.length() * grid.length();
  const Vec2 f0 = total * (ds / area);
  for (double& v : f.u.data()) v += f0.x;
  for (double& v : f.v.data()) v += f0.y;
  return f;
}

double dfib_interpolant_divergence(const NodeField& a, Vec2 point, const Kernel1D& kernel) {
  const double h = a.grid().h();
  const Stencil1D sx = kernel.stencil(lattice_coord(point.x, h, 0.0), true);
  const Stencil1D sy = kernel.stencil(lattice_coord(point.y, h, 0.0), true);
  // dU/dX with U = -dA/dY, and dV/dY with V = dA/dX, accumulated separately.
  double dU_dX = 0.0;
  double dV_dY = 0.0;
  for (int i = 0; i < sx.count; ++i) {
    for (int j = 0; j < sy.count; ++j) {
      const double aij = a(sx.first + i, sy.first + j);
      dU_dX += aij * (-sx.deriv[i] / h) * (sy.deriv[j] / h);
    }
  }
  for (int j = 0; j < sy.count; ++j) {
    for (int i = 0; i < sx.count; ++i) {
      const double aij = a(sx.first + i, sy.first + j);
      dV_dY -= aij * (sx.deriv[i] / h) * (-sy.deriv[j] / h);
    }
  }
  return dU_dX + dV_dY;
}

// ---------------------------------------------------------------------------

CouplingScheme CouplingScheme::standard(const CompositeDelta& delta, const GridSpec& grid) {
  return CouplingScheme(CouplingMethod::StandardIB, delta, grid, nullptr);
}

CouplingScheme CouplingScheme::dfib(const Kernel1D& kernel, std::shared_ptr<const SpectralSolver> solver) {
  require_c2(kernel);
  if (!solver) throw std::invalid_argument("DFIB needs a spectral solver");
  const GridSpec grid = solver->grid();
  return CouplingScheme(CouplingMethod::DFIB, CompositeDelta::isotropic(kernel, grid.h()), grid,
                        std::move(solver));
}

std::string CouplingScheme::name() const {
  return method_ == CouplingMethod::DFIB ? std::string("dfib") : delta_.name();
}

std::vector<Vec2> CouplingScheme::interpolate(const EdgeVectorField& w, std::span<const Vec2> markers) const {
  if (method_ == CouplingMethod::DFIB) return dfib_interpolate(w, markers, delta_.normal, *solver_);
  return ib_interpolate(w, markers, delta_);
}

EdgeVectorField CouplingScheme::spread(std::span<const Vec2> forces, std::span<const Vec2> markers,
                                       double ds) const {
  if (method_ == CouplingMethod::DFIB) return dfib_spread(forces, markers, ds, delta_.normal, *solver_);
  return ib_spread(forces, markers, ds, delta_, grid_);
}

}  // namespace ibkit
