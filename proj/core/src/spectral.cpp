#include "ibkit/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

namespace ibkit {
namespace {

// FFTW's planner is not thread-safe; execution of existing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

using cplx = std::complex<double>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t n) {
  return std::unique_ptr<T[], FftwFree>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

std::string describe_mean(double mean, double scale) {
  std::ostringstream os;
  os << "Poisson right-hand side has nonzero mean " << mean << " (max |rhs| = " << scale << ")";
  return os.str();
}

}  // namespace

IncompatibleRhs::IncompatibleRhs(double mean, double scale)
    : std::domain_error(describe_mean(mean, scale)), mean_(mean) {}

struct SpectralSolver::Impl {
  GridSpec grid;
  int n;
  int nc;  // N/2 + 1 complex entries along the second axis
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  // Per-mode data, laid out like the r2c output.
  std::vector<double> eigen;  // eigenvalue of the 5-point Laplacian
  std::vector<cplx> shift_x;  // exp(i theta_x)
  std::vector<cplx> shift_y;  // exp(i theta_y)

  explicit Impl(const GridSpec& g) : grid(g), n(g.n()), nc(g.n() / 2 + 1) {
    const std::size_t real_size = static_cast<std::size_t>(n) * n;
    const std::size_t cplx_size = static_cast<std::size_t>(n) * nc;
    auto in = fftw_buffer<double>(real_size);
    auto out = fftw_buffer<fftw_complex>(cplx_size);
    {
      std::lock_guard lock(planner_mutex());
      forward = fftw_plan_dft_r2c_2d(n, n, in.get(), out.get(), FFTW_ESTIMATE | FFTW_UNALIGNED);
      backward = fftw_plan_dft_c2r_2d(n, n, out.get(), in.get(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    if (forward == nullptr || backward == nullptr) throw std::runtime_error("FFTW planning failed");

    eigen.resize(cplx_size);
    shift_x.resize(cplx_size);
    shift_y.resize(cplx_size);
    const double inv_h2 = 1.0 / (g.h() * g.h());
    for (int k = 0; k < n; ++k) {
      const double tx = 2.0 * std::numbers::pi * k / n;
      for (int l = 0; l < nc; ++l) {
        const double ty = 2.0 * std::numbers::pi * l / n;
        const std::size_t idx = static_cast<std::size_t>(k) * nc + l;
        const double sx = std::sin(0.5 * tx);
        const double sy = std::sin(0.5 * ty);
        eigen[idx] = -4.0 * inv_h2 * (sx * sx + sy * sy);
        shift_x[idx] = std::polar(1.0, tx);
        shift_y[idx] = std::polar(1.0, ty);
      }
    }
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (backward != nullptr) fftw_destroy_plan(backward);
  }

  std::size_t modes() const { return static_cast<std::size_t>(n) * nc; }

  std::vector<cplx> transform(const std::vector<double>& data) const {
    std::vector<double> in(data);
    std::vector<cplx> out(modes());
    fftw_execute_dft_r2c(forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
  }

  // Consumes `spec`; includes the 1/N^2 normalization.
  void inverse(std::vector<cplx>& spec, std::vector<double>& data) const {
    data.resize(static_cast<std::size_t>(n) * n);
    fftw_execute_dft_c2r(backward, reinterpret_cast<fftw_complex*>(spec.data()), data.data());
    const double scale = 1.0 / (static_cast<double>(n) * n);
    for (double& v : data) v *= scale;
  }
};

SpectralSolver::SpectralSolver(const GridSpec& grid) : impl_(std::make_unique<Impl>(grid)) {}
SpectralSolver::~SpectralSolver() = default;
SpectralSolver::SpectralSolver(SpectralSolver&&) noexcept = default;
SpectralSolver& SpectralSolver::operator=(SpectralSolver&&) noexcept = default;

const GridSpec& SpectralSolver::grid() const { return impl_->grid; }

template <Centering C>
Field<C> SpectralSolver::poisson_solve(const Field<C>& rhs) const {
  const double m = mean(rhs);
  const double scale = max_abs(rhs);
  if (std::abs(m) > 1e-10 * scale) throw IncompatibleRhs(m, scale);

  std::vector<cplx> spec = impl_->transform(rhs.data());
  spec[0] = 0.0;
  for (std::size_t idx = 1; idx < spec.size(); ++idx) spec[idx] /= impl_->eigen[idx];
  Field<C> out(rhs.grid());
  impl_->inverse(spec, out.data());
  return out;
}

template CellField SpectralSolver::poisson_solve(const CellField&) const;
template NodeField SpectralSolver::poisson_solve(const NodeField&) const;
template XEdgeField SpectralSolver::poisson_solve(const XEdgeField&) const;
template YEdgeField SpectralSolver::poisson_solve(const YEdgeField&) const;

StokesResult SpectralSolver::stokes_step(const EdgeVectorField& u0, const EdgeVectorField& f,
                                         const EdgeVectorField& adv, double rho, double mu,
                                         double dt) const {
  if (!(rho > 0.0) || !(mu >= 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("stokes_step needs rho > 0, mu >= 0, dt > 0");
  }
  const Impl& im = *impl_;
  const double h = im.grid.h();

  std::vector<cplx> ru = im.transform(u0.u.data());
  std::vector<cplx> rv = im.transform(u0.v.data());
  {
    const std::vector<cplx> fu = im.transform(f.u.data());
    const std::vector<cplx> fv = im.transform(f.v.data());
    const std::vector<cplx> au = im.transform(adv.u.data());
    const std::vector<cplx> av = im.transform(adv.v.data());
    for (std::size_t idx = 0; idx < im.modes(); ++idx) {
      const double explicit_part = rho / dt + 0.5 * mu * im.eigen[idx];
      ru[idx] = explicit_part * ru[idx] - rho * au[idx] + fu[idx];
      rv[idx] = explicit_part * rv[idx] - rho * av[idx] + fv[idx];
    }
  }

  std::vector<cplx> pp(im.modes());
  for (std::size_t idx = 0; idx < im.modes(); ++idx) {
    const double implicit_part = rho / dt - 0.5 * mu * im.eigen[idx];
    if (idx == 0) {
      // Zero mode: no pressure, no viscosity.
      pp[idx] = 0.0;
      ru[idx] /= implicit_part;
      rv[idx] /= implicit_part;
      continue;
    }
    const cplx dxp = im.shift_x[idx] - 1.0;  // forward difference (divergence)
    const cplx dyp = im.shift_y[idx] - 1.0;
    const cplx dxm = 1.0 - std::conj(im.shift_x[idx]);  // backward difference (gradient)
    const cplx dym = 1.0 - std::conj(im.shift_y[idx]);
    const cplx p = (dxp * ru[idx] + dyp * rv[idx]) / (h * im.eigen[idx]);
    pp[idx] = p;
    ru[idx] = (ru[idx] - dxm * p / h) / implicit_part;
    rv[idx] = (rv[idx] - dym * p / h) / implicit_part;
  }

  StokesResult out{EdgeVectorField(im.grid), CellField(im.grid)};
  im.inverse(ru, out.u.u.data());
  im.inverse(rv, out.u.v.data());
  im.inverse(pp, out.p.data());
  return out;
}

}  // namespace ibkit
