#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "ibkit/selftest.hpp"

namespace ibkit::cli {
namespace {

using nlohmann::json;

template <typename T>
T take(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("config key '" + key + "' has the wrong type");
  }
}

int take_int(const json& v, const std::string& key) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw std::invalid_argument("config key '" + key + "' must be an integer");
  }
  return v.get<int>();
}

double take_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw std::invalid_argument("config key '" + key + "' must be a number");
  return v.get<double>();
}

using Setter = std::function<void(ExperimentConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"n", [](ExperimentConfig& c, const json& v, const std::string& k) { c.n = take_int(v, k); }},
      {"length", [](ExperimentConfig& c, const json& v, const std::string& k) { c.length = take_double(v, k); }},
      {"dt_frac", [](ExperimentConfig& c, const json& v, const std::string& k) { c.dt_frac = take_double(v, k); }},
      {"t_final", [](ExperimentConfig& c, const json& v, const std::string& k) { c.t_final = take_double(v, k); }},
      {"kernel", [](ExperimentConfig& c, const json& v, const std::string& k) { c.kernel = take<std::string>(v, k); }},
      {"method", [](ExperimentConfig& c, const json& v, const std::string& k) { c.method = take<std::string>(v, k); }},
      {"mfac", [](ExperimentConfig& c, const json& v, const std::string& k) { c.mfac = take_double(v, k); }},
      {"rho", [](ExperimentConfig& c, const json& v, const std::string& k) { c.rho = take_double(v, k); }},
      {"mu", [](ExperimentConfig& c, const json& v, const std::string& k) { c.mu = take_double(v, k); }},
      {"kappa0", [](ExperimentConfig& c, const json& v, const std::string& k) { c.kappa0 = take_double(v, k); }},
      {"tau", [](ExperimentConfig& c, const json& v, const std::string& k) { c.tau = take_double(v, k); }},
      {"omega0", [](ExperimentConfig& c, const json& v, const std::string& k) { c.omega0 = take_double(v, k); }},
      {"mode_p", [](ExperimentConfig& c, const json& v, const std::string& k) { c.mode_p = take_int(v, k); }},
      {"eps", [](ExperimentConfig& c, const json& v, const std::string& k) { c.eps = take_double(v, k); }},
      {"radius", [](ExperimentConfig& c, const json& v, const std::string& k) { c.radius = take_double(v, k); }},
      {"out", [](ExperimentConfig& c, const json& v, const std::string& k) { c.out = take<std::string>(v, k); }},
      {"tracer_multiplier",
       [](ExperimentConfig& c, const json& v, const std::string& k) { c.tracer_multiplier = take_int(v, k); }},
      {"overwrite", [](ExperimentConfig& c, const json& v, const std::string& k) { c.overwrite = take<bool>(v, k); }},
  };
  return table;
}

/// Flag values; only the ones given on the command line are applied.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> kernel, method, out;
  std::optional<int> n, mode_p, tracer_multiplier;
  std::optional<double> length, dt_frac, t_final, mfac, rho, mu, kappa0, tau, omega0, eps, radius;
  bool overwrite = false;

  void apply(ExperimentConfig& c) const {
    if (kernel) c.kernel = *kernel;
    if (method) c.method = *method;
    if (out) c.out = *out;
    if (n) c.n = *n;
    if (mode_p) c.mode_p = *mode_p;
    if (tracer_multiplier) c.tracer_multiplier = *tracer_multiplier;
    if (length) c.length = *length;
    if (dt_frac) c.dt_frac = *dt_frac;
    if (t_final) c.t_final = *t_final;
    if (mfac) c.mfac = *mfac;
    if (rho) c.rho = *rho;
    if (mu) c.mu = *mu;
    if (kappa0) c.kappa0 = *kappa0;
    if (tau) c.tau = *tau;
    if (omega0) c.omega0 = *omega0;
    if (eps) c.eps = *eps;
    if (radius) c.radius = *radius;
    if (overwrite) c.overwrite = true;
  }
};

void add_flags(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "Flat JSON file with ExperimentConfig keys");
  sub.add_option("--kernel", f.kernel, "bs2bs1 bs3bs2 bs4bs3 bs5bs4 bs6bs5 ib4 ib6");
  sub.add_option("--method", f.method, "ib or dfib");
  sub.add_option("--grid-n", f.n, "Grid cells per side (power of two)");
  sub.add_option("--domain-l", f.length, "Domain side length");
  sub.add_option("--dt-frac", f.dt_frac, "Time step is h / dt-frac");
  sub.add_option("--t-final", f.t_final, "Final time");
  sub.add_option("--mfac", f.mfac, "Marker spacing over h");
  sub.add_option("--rho", f.rho, "Fluid density");
  sub.add_option("--mu", f.mu, "Dynamic viscosity");
  sub.add_option("--kappa0", f.kappa0, "Spring stiffness");
  sub.add_option("--tau", f.tau, "Stiffness modulation amplitude");
  sub.add_option("--omega0", f.omega0, "Stiffness modulation frequency");
  sub.add_option("--mode-p", f.mode_p, "Perturbation mode");
  sub.add_option("--eps", f.eps, "Perturbation amplitude");
  sub.add_option("--radius", f.radius, "Membrane radius");
  sub.add_option("--tracer-multiplier", f.tracer_multiplier, "Tracers per marker (0 selects automatically)");
  sub.add_option("--out", f.out, "Output directory");
  sub.add_flag("--overwrite", f.overwrite, "Replace existing output files");
}

std::filesystem::path out_path(const ExperimentConfig& c, const std::string& name) {
  return std::filesystem::path(c.out) / name;
}

void require_absent(const ExperimentConfig& c, std::initializer_list<std::filesystem::path> paths) {
  if (c.overwrite) return;
  for (const auto& p : paths) {
    if (std::filesystem::exists(p)) {
      throw std::runtime_error("refusing to overwrite " + p.string() + " (pass --overwrite)");
    }
  }
}

constexpr double kCurlLadder[] = {4.0,        2.0,         1.0,         0.5,          0.25,         0.125,
                                  1.0 / 16.0, 1.0 / 32.0,  1.0 / 64.0,  1.0 / 128.0,  1.0 / 256.0};

int cmd_advect(const ExperimentConfig& c, std::ostream& out) {
  const auto path = out_path(c, "advect_" + scheme_label(c) + "_dt" + dt_label(c.dt_frac) + ".csv");
  require_absent(c, {path});
  const AdvectionResult r = run_advection_test(c);
  CsvWriter w(path, {"step", "t", "area", "rel_area_err"}, c.overwrite);
  long step = 0;
  for (const AreaSample& s : r.audit.samples()) w.row_with_index(step++, {s.t, s.area, s.rel_error});
  out << "tracers " << r.tracers << " (x" << r.multiplier << "), mean relative area error "
      << format_number(r.mean_rel_error) << "\nwrote " << path.string() << "\n";
  return 0;
}

int cmd_membrane_eq(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const std::string base = "membrane_eq_" + scheme_label(c);
  const auto path = out_path(c, base + ".csv");
  const auto fpath = out_path(c, base + "_force.csv");
  require_absent(c, {path, fpath});
  const MembraneResult r = run_equilibrium_membrane(c, true);
  CsvWriter w(path, {"step", "t", "rel_area_err", "max_vorticity", "max_velocity", "force_l2_err"}, c.overwrite);
  for (const MembraneRow& row : r.rows) {
    w.row_with_index(row.step, {row.t, row.rel_area_err, row.max_vorticity, row.max_velocity, row.force_l2_err});
  }
  CsvWriter wf(fpath, {"k", "s", "force_err"}, c.overwrite);
  const double ds = 2.0 * std::acos(-1.0) / static_cast<double>(r.final_force.pointwise.size());
  for (std::size_t k = 0; k < r.final_force.pointwise.size(); ++k) {
    wf.row_with_index(static_cast<long>(k), {static_cast<double>(k) * ds, r.final_force.pointwise[k]});
  }
  out << "max relative area error " << format_number(r.max_rel_area_err) << ", final force L2 error "
      << format_number(r.final_force.l2) << "\nwrote " << path.string() << "\nwrote " << fpath.string() << "\n";
  if (r.max_divergence > 1e-10 || r.max_pairing_error > 1e-11) {
    err << "invariant violated: max divergence " << r.max_divergence << ", max energy pairing error "
        << r.max_pairing_error << "\n";
    return 1;
  }
  return 0;
}

int cmd_membrane_param(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const auto path = out_path(c, "membrane_param_" + scheme_label(c) + "_dt" + dt_label(c.dt_frac) + ".csv");
  require_absent(c, {path});
  const ParametricResult r = run_parametric_membrane(c);
  CsvWriter w(path, {"step", "t", "rel_area_err", "max_vorticity", "max_velocity"}, c.overwrite);
  for (const MembraneRow& row : r.rows) {
    w.row_with_index(row.step, {row.t, row.rel_area_err, row.max_vorticity, row.max_velocity});
  }
  out << "wrote " << path.string() << "\n";
  if (r.unstable) {
    err << r.failure << "\n";
    return 1;
  }
  out << "max relative area error " << format_number(r.max_rel_area_err) << "\n";
  return 0;
}

int cmd_curl_diag(const ExperimentConfig& c, std::ostream& out) {
  const auto path = out_path(c, "curl_diag_" + scheme_label(c) + ".csv");
  require_absent(c, {path});
  const auto rows = curl_of_spread_force(c, kCurlLadder);
  CsvWriter w(path, {"mfac", "ds", "max_curl_f"}, c.overwrite);
  std::vector<double> ds, curl;
  double residual = 0.0;
  for (const CurlRow& row : rows) {
    w.row({row.mfac, row.ds, row.max_curl_f});
    residual = std::max(residual, row.dfib_residual);
    if (row.mfac <= 0.25) {
      ds.push_back(row.ds);
      curl.push_back(row.max_curl_f);
    }
  }
  out << "slope over mfac <= 1/4: " << format_number(loglog_fit(ds, curl).slope) << "\n";
  if (c.method == "dfib") out << "max |curl f - R|: " << format_number(residual) << "\n";
  out << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_spurious(const ExperimentConfig& c, std::ostream& out) {
  const std::string base = "spurious_" + scheme_label(c) + "_";
  const auto ph = out_path(c, base + "h.csv");
  const auto pk = out_path(c, base + "kappa.csv");
  const auto pm = out_path(c, base + "mu.csv");
  require_absent(c, {ph, pk, pm});
  const double hs[] = {2.0 * c.h(), c.h(), 0.5 * c.h(), 0.25 * c.h()};
  const double scale[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> ks, ms;
  for (double s : scale) {
    ks.push_back(s * c.kappa0);
    ms.push_back(s * c.mu);
  }
  auto sweep = [&](const std::filesystem::path& p, SweepParameter which, std::span<const double> values,
                   const char* name) {
    const auto rows = run_spurious_flow_study(c, which, values);
    CsvWriter w(p, {"value", "max_velocity", "max_vorticity"}, c.overwrite);
    std::vector<double> x, u, om;
    for (const SpuriousRow& r : rows) {
      w.row({r.value, r.max_velocity, r.max_vorticity});
      x.push_back(r.value);
      u.push_back(r.max_velocity);
      om.push_back(r.max_vorticity);
    }
    out << name << ": slope max|u| " << format_number(loglog_fit(x, u).slope) << ", slope max|omega| "
        << format_number(loglog_fit(x, om).slope) << "\nwrote " << p.string() << "\n";
  };
  sweep(ph, SweepParameter::MeshWidth, hs, "h");
  sweep(pk, SweepParameter::Stiffness, ks, "kappa");
  sweep(pm, SweepParameter::Viscosity, ms, "mu");
  return 0;
}

int cmd_lte(const ExperimentConfig& c, std::ostream& out) {
  const std::string base = "lte_" + scheme_label(c) + "_";
  const auto pe = out_path(c, base + "euler.csv");
  const auto pm = out_path(c, base + "midpoint.csv");
  require_absent(c, {pe, pm});
  const int sizes[] = {c.n, 2 * c.n, 4 * c.n};
  std::vector<double> dts;
  for (int k = 0; k <= 12; ++k) dts.push_back(1e-2 * std::pow(0.25, k));
  const int mult = c.tracer_multiplier > 0 ? c.tracer_multiplier : 4;
  const int tracers = mult * markers_for_mfac(c.radius, c.mfac, c.h());
  for (auto [p, integ] : {std::pair{pe, Integrator::ForwardEuler}, std::pair{pm, Integrator::ExplicitMidpoint}}) {
    const auto rows = run_lte_study(c, integ, sizes, dts, tracers);
    CsvWriter w(p, {"h", "dt", "rel_area_err"}, c.overwrite);
    for (const LteRow& r : rows) w.row({r.h, r.dt, r.rel_area_err});
    out << "wrote " << p.string() << "\n";
  }
  return 0;
}

int cmd_selftest(std::ostream& out) {
  int passed = 0, failed = 0;
  for (const InvariantCheck& chk : run_invariant_suite()) {
    out << (chk.passed() ? "PASS " : "FAIL ") << chk.name << ": " << format_number(chk.value) << " (tol "
        << format_number(chk.tolerance) << ")\n";
    (chk.passed() ? passed : failed) += 1;
  }
  out << passed << " passed, " << failed << " failed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

void apply_config_json(ExperimentConfig& config, std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config file must hold a flat JSON object");
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw std::invalid_argument("unknown config key '" + key + "'");
    if (value.is_object() || value.is_array()) {
      throw std::invalid_argument("config key '" + key + "' must be a scalar");
    }
    it->second(config, value, key);
  }
}

ExperimentConfig load_config(std::string_view experiment, const std::filesystem::path& file) {
  ExperimentConfig c = default_config(experiment);
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_json(c, ss.str());
  return c;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string scheme_label(const ExperimentConfig& config) {
  return config.method == "dfib" ? std::string("dfib") : config.kernel;
}

std::string dt_label(double dt_frac) {
  if (dt_frac == std::floor(dt_frac) && std::abs(dt_frac) < 1e15) {
    return std::to_string(static_cast<long long>(dt_frac));
  }
  return format_number(dt_frac);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header,
                     bool overwrite)
    : path_(path) {
  if (!overwrite && std::filesystem::exists(path)) {
    throw std::runtime_error("refusing to overwrite " + path.string() + " (pass --overwrite)");
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  bool first = true;
  for (std::string_view h : header) {
    out_ << (first ? "" : ",") << h;
    first = false;
  }
  out_ << "\n";
}

void CsvWriter::row(std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    out_ << (first ? "" : ",") << format_number(v);
    first = false;
  }
  out_ << "\n";
}

void CsvWriter::row_with_index(long index, std::initializer_list<double> values) {
  out_ << index;
  for (double v : values) out_ << "," << format_number(v);
  out_ << "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Immersed boundary experiments on a periodic MAC grid", "ibkit"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<CLI::App*> experiments;
  for (std::string_view name : experiment_names()) {
    CLI::App* sub = app.add_subcommand(std::string(name), "Run the " + std::string(name) + " experiment");
    add_flags(*sub, flags);
    experiments.push_back(sub);
  }
  CLI::App* selftest = app.add_subcommand("selftest", "Run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (selftest->parsed()) return cmd_selftest(out);
    for (CLI::App* sub : experiments) {
      if (!sub->parsed()) continue;
      const std::string name = sub->get_name();
      ExperimentConfig c = flags.config ? load_config(name, *flags.config) : default_config(name);
      flags.apply(c);
      c.validate();
      if (name == "advect") return cmd_advect(c, out);
      if (name == "membrane-eq") return cmd_membrane_eq(c, out, err);
      if (name == "membrane-param") return cmd_membrane_param(c, out, err);
      if (name == "curl-diag") return cmd_curl_diag(c, out);
      if (name == "spurious") return cmd_spurious(c, out);
      if (name == "lte") return cmd_lte(c, out);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InstabilityError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ibkit::cli
