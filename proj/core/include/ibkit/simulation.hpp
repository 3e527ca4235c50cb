#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ibkit/coupling.hpp"
#include "ibkit/grid.hpp"
#include "ibkit/spectral.hpp"
#include "ibkit/structure.hpp"

namespace ibkit {

/// Parameters shared by every experiment. Dimensional values must be positive.
struct ExperimentConfig {
  std::string experiment = "membrane-eq";
  int n = 64;
  double length = 1.0;
  double dt_frac = 8.0;  // dt = h / dt_frac
  double t_final = 2.0;
  std::string kernel = "bs4bs3";
  std::string method = "ib";  // "ib" or "dfib"
  double mfac = 0.5;
  double rho = 1.0;
  double mu = 0.1;
  double kappa0 = 1.0;
  double tau = 0.0;
  double omega0 = 0.0;
  int mode_p = 2;
  double eps = 0.0;
  double radius = 0.25;
  std::string out = ".";
  int tracer_multiplier = 0;  // 0 selects automatically
  bool overwrite = false;

  double h() const { return length / n; }
  double dt() const { return h() / dt_frac; }
  GridSpec grid() const { return GridSpec(n, length); }
  SpringModel spring() const { return {kappa0, tau, omega0}; }

  /// Throws std::invalid_argument describing the first violated rule.
  void validate() const;
};

/// Default parameters for one experiment id.
ExperimentConfig default_config(std::string_view experiment);
std::span<const std::string_view> experiment_names();

/// Coupling scheme named by config.method / config.kernel. DFIB needs an
/// isotropic C^2 kernel.
CouplingScheme make_scheme(const ExperimentConfig& config, std::shared_ptr<const SpectralSolver> solver);

/// Thrown when a run blows up. `step()` is the index of the failed step.
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(int step, const std::string& what);
  int step() const { return step_; }

 private:
  int step_;
};

struct SimState {
  double t = 0.0;
  int step = 0;
  EdgeVectorField u;
  Curve curve;
  std::vector<Vec2> tracers;
  std::optional<EdgeVectorField> prev_convective;
  double rho = 1.0;
  double mu = 0.1;
  double dt = 0.0;

  SimState(const GridSpec& grid, Curve c, std::vector<Vec2> tr, double rho_, double mu_, double dt_)
      : u(grid), curve(std::move(c)), tracers(std::move(tr)), rho(rho_), mu(mu_), dt(dt_) {}
};

struct StepReport {
  double max_divergence = 0.0;  // max |div u^{n+1}| * h / max |u^{n+1}|
  /// |sum u.f h^2 - sum U.F ds| relative to the larger side; computed on request.
  std::optional<double> energy_pairing_error;
};

/// One step of the semi-implicit scheme. The first step replaces the AB2
/// extrapolation of the convective term by a Heun (RK2) predictor-corrector.
StepReport fsi_step(SimState& state, const CouplingScheme& scheme, const SpectralSolver& solver,
                    const SpringModel& spring, bool check_pairing = false);

// ---------------------------------------------------------------------------
// Experiments

/// Samples analytic component functions onto the MAC edges.
EdgeVectorField sample_edges(const GridSpec& grid, const std::function<double(double, double)>& fu,
                             const std::function<double(double, double)>& fv);

/// Taylor-Green flow with unit drift, decaying at rate 8 pi^2 nu.
EdgeVectorField taylor_green(const GridSpec& grid, double t, double nu);

struct AdvectionResult {
  AreaAudit audit;
  int tracers = 0;
  int multiplier = 0;
  double mean_rel_error = 0.0;  // over t in [0, 1]
};

/// Tracers on the circle advected through the sampled Taylor-Green field with
/// the explicit midpoint rule.
AdvectionResult run_advection_test(const ExperimentConfig& config);

struct MembraneRow {
  int step;
  double t;
  double rel_area_err;
  double max_vorticity;
  double max_velocity;
  double force_l2_err;
};

struct MembraneResult {
  std::vector<MembraneRow> rows;
  ForceErrors final_force;
  std::vector<Vec2> final_markers;
  double max_rel_area_err = 0.0;
  double max_divergence = 0.0;
  double max_pairing_error = 0.0;
  int tracers = 0;
};

/// Pressurized circular membrane released from rest at equilibrium.
MembraneResult run_equilibrium_membrane(const ExperimentConfig& config, bool check_pairing = false);

struct CurlRow {
  double mfac;
  double ds;
  double max_curl_f;
  double dfib_residual;  // max |curl f - R| for DFIB, else 0
};

/// Spreads the spring force of the exact circle once per mesh factor.
std::vector<CurlRow> curl_of_spread_force(const ExperimentConfig& config, std::span<const double> mfacs);

struct ParametricResult {
  std::vector<MembraneRow> rows;  // vorticity/velocity/force columns filled as in membrane runs
  double max_rel_area_err = 0.0;
  double final_rel_area_err = 0.0;
  bool unstable = false;
  int failed_step = -1;
  std::string failure;
};

/// Membrane with time-periodic stiffness, started from the perturbed circle.
/// Instability is reported in the result, not thrown.
ParametricResult run_parametric_membrane(const ExperimentConfig& config);

enum class SweepParameter { MeshWidth, Stiffness, Viscosity };

struct SpuriousRow {
  double value;  // h, kappa or mu
  double max_velocity;
  double max_vorticity;
};

/// Equilibrium runs to config.t_final over `values` of one parameter.
std::vector<SpuriousRow> run_spurious_flow_study(const ExperimentConfig& config, SweepParameter which,
                                                 std::span<const double> values);

enum class Integrator { ForwardEuler, ExplicitMidpoint };

struct LteRow {
  double h;
  double dt;
  double rel_area_err;
};

/// Static field (3 cos(4 pi (y - pi/4)), 2 sin(2 pi (x - pi/4))) sampled on
/// the grid; one step of `integrator` from the circle, per (h, dt).
/// `tracer_count` fixes the tracer number for every h.
std::vector<LteRow> run_lte_study(const ExperimentConfig& config, Integrator integrator,
                                  std::span<const int> grid_sizes, std::span<const double> dts,
                                  int tracer_count);

// ---------------------------------------------------------------------------
// Sweep helpers

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares fit of log(y) against log(x).
SlopeFit loglog_fit(std::span<const double> x, std::span<const double> y);

/// Fit over the `count` points with the smallest x.
SlopeFit asymptotic_slope(std::span<const double> x, std::span<const double> y, int count = 3);

/// Worker count for sweeps: IBKIT_THREADS if set, else hardware concurrency.
int sweep_threads();

/// Runs task(i) for i in [0, count) on up to sweep_threads() threads.
/// Exceptions are rethrown on the calling thread.
void parallel_for(int count, const std::function<void(int)>& task);

}  // namespace ibkit
