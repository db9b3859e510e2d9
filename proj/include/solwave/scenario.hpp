#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "solwave/collision.hpp"
#include "solwave/csv.hpp"
#include "solwave/errors.hpp"
#include "solwave/field.hpp"
#include "solwave/kdv.hpp"
#include "solwave/nls.hpp"
#include "solwave/pcs.hpp"
#include "solwave/rng.hpp"
#include "solwave/squeeze.hpp"
#include "solwave/wavelet.hpp"
#include "solwave/wdm.hpp"
#include "solwave/wft.hpp"

namespace solwave {

// ---------------------------------------------------------------------------
// Config files: line-oriented `key = value` under `[section]` headers.
// `#` starts a comment. Keys are addressed as "section.key".
// ---------------------------------------------------------------------------

class Config {
public:
  static Config parse(std::istream& is, const std::string& origin = "<stream>") {
    Config cfg;
    cfg.origin_ = origin;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw config_error(origin + ":" + std::to_string(lineno) + ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty())
          throw config_error(origin + ":" + std::to_string(lineno) + ": empty section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw config_error(origin + ":" + std::to_string(lineno) + ": expected `key = value`");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
      const std::string full = section.empty() ? key : section + "." + key;
      if (cfg.values_.count(full))
        throw config_error(origin + ":" + std::to_string(lineno) + ": duplicate key `" + full + "`");
      cfg.values_[full] = value;
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot read config file: " + path);
    return parse(is, path);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key) const { return raw(key); }

  double get_double(const std::string& key) const {
    const std::string v = raw(key);
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing characters");
      return d;
    } catch (const std::exception&) {
      throw config_error(origin_ + ": key `" + key + "` expects a real number, got `" + v + "`");
    }
  }

  long get_int(const std::string& key) const {
    const std::string v = raw(key);
    try {
      std::size_t pos = 0;
      const long i = std::stol(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing characters");
      return i;
    } catch (const std::exception&) {
      throw config_error(origin_ + ": key `" + key + "` expects an integer, got `" + v + "`");
    }
  }

  bool get_bool(const std::string& key) const {
    const std::string v = raw(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw config_error(origin_ + ": key `" + key + "` expects a boolean, got `" + v + "`");
  }

  std::string get_string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
  }
  double get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }
  long get_int_or(const std::string& key, long fallback) const {
    return has(key) ? get_int(key) : fallback;
  }
  bool get_bool_or(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> ks;
    for (auto& [k, v] : values_) ks.push_back(k);
    return ks;
  }

  const std::string& origin() const { return origin_; }

private:
  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
  }

  std::string raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
      throw config_error(origin_ + ": missing required key `" + key + "`");
    return it->second;
  }

  std::map<std::string, std::string> values_;
  std::string origin_;
};

// ---------------------------------------------------------------------------
// Scenario schemas
// ---------------------------------------------------------------------------

enum class FieldType { integer, real, boolean, text };

inline std::string to_string(FieldType t) {
  switch (t) {
    case FieldType::integer: return "integer";
    case FieldType::real: return "real";
    case FieldType::boolean: return "boolean";
    case FieldType::text: return "text";
  }
  return "?";
}

struct FieldSpec {
  std::string key;
  FieldType type;
  bool required;
};

inline const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> kinds = {"kdv",     "nls", "wdm",    "collide",
                                                 "squeeze", "pcs", "wavelet"};
  return kinds;
}

namespace detail {

inline std::vector<FieldSpec> common_schema() {
  return {
      {"scenario.kind", FieldType::text, true},
      {"scenario.name", FieldType::text, true},
      {"scenario.seed", FieldType::integer, false},
      {"scenario.out", FieldType::text, false},
  };
}

inline std::vector<FieldSpec> grid_schema() {
  return {
      {"grid.n", FieldType::integer, true},
      {"grid.length", FieldType::real, true},
      {"grid.x0", FieldType::real, true},
  };
}

inline std::vector<FieldSpec> schema_for(const std::string& kind) {
  std::vector<FieldSpec> s = common_schema();
  auto add = [&s](std::vector<FieldSpec> more) {
    for (auto& f : more) s.push_back(std::move(f));
  };
  if (kind == "kdv") {
    add(grid_schema());
    add({{"kdv.dt", FieldType::real, true},
         {"kdv.t_end", FieldType::real, true},
         {"kdv.snapshot_stride", FieldType::integer, false},
         {"kdv.dealias", FieldType::boolean, false},
         {"kdv.c0", FieldType::real, true},
         {"kdv.center0", FieldType::real, true},
         {"kdv.c1", FieldType::real, false},
         {"kdv.center1", FieldType::real, false}});
  } else if (kind == "nls") {
    add(grid_schema());
    add({{"nls.beta2", FieldType::real, true},
         {"nls.nu", FieldType::real, true},
         {"nls.dz", FieldType::real, true},
         {"nls.z_end", FieldType::real, true},
         {"nls.snapshot_stride", FieldType::integer, false},
         {"pulse.kind", FieldType::text, true},
         {"pulse.amplitude", FieldType::real, false},
         {"pulse.width", FieldType::real, false},
         {"pulse.center", FieldType::real, false},
         {"pulse.bits", FieldType::text, false},
         {"pulse.rho0", FieldType::real, false},
         {"pulse.bit_width", FieldType::real, false},
         {"pulse.rise", FieldType::real, false},
         {"pulse.phase_mod_slope", FieldType::real, false},
         {"filter.center_freq", FieldType::real, false},
         {"filter.bandwidth", FieldType::real, false},
         {"filter.gain", FieldType::real, false},
         {"filter.span", FieldType::real, false},
         {"checks.soliton_shape_tol", FieldType::real, false},
         {"checks.steepening_min_growth", FieldType::real, false},
         {"checks.steepening_z_star", FieldType::real, false}});
  } else if (kind == "wdm") {
    add(grid_schema());
    add({{"nls.beta2", FieldType::real, true},
         {"nls.nu", FieldType::real, true},
         {"nls.dz", FieldType::real, true},
         {"nls.z_end", FieldType::real, true},
         {"nls.snapshot_stride", FieldType::integer, false},
         {"wdm.alpha", FieldType::real, true},
         {"wdm.gamma", FieldType::real, true},
         {"channel0.omega", FieldType::real, true},
         {"channel0.amplitude", FieldType::real, true},
         {"channel0.width", FieldType::real, true},
         {"channel0.center", FieldType::real, true},
         {"channel1.omega", FieldType::real, true},
         {"channel1.amplitude", FieldType::real, true},
         {"channel1.width", FieldType::real, true},
         {"channel1.center", FieldType::real, true}});
  } else if (kind == "collide") {
    add({{"collision.beta0", FieldType::real, true},
         {"collision.beta1", FieldType::real, true},
         {"collision.gamma0", FieldType::real, true},
         {"collision.gamma1", FieldType::real, true},
         {"collision.T0", FieldType::real, true},
         {"collision.T1", FieldType::real, true},
         {"collision.sigma0", FieldType::real, true},
         {"collision.sigma1", FieldType::real, true},
         {"collision.epsD0", FieldType::real, true},
         {"collision.epsD1", FieldType::real, true},
         {"collision.separation", FieldType::real, true},
         {"collision.z_end", FieldType::real, true},
         {"checks.symmetric_net_domega", FieldType::boolean, false}});
  } else if (kind == "squeeze") {
    add({{"sweep.kappa1_min", FieldType::real, true},
         {"sweep.kappa1_max", FieldType::real, true},
         {"sweep.steps", FieldType::integer, true},
         {"sweep.kappa2", FieldType::real, true},
         {"fit.enabled", FieldType::boolean, false},
         {"fit.input", FieldType::text, false},
         {"fit.amplitude", FieldType::real, false},
         {"fit.width", FieldType::real, false},
         {"fit.center", FieldType::real, false},
         {"fit.offset", FieldType::real, false},
         {"fit.noise", FieldType::real, false},
         {"fit.samples", FieldType::integer, false},
         {"fit.t_min", FieldType::real, false},
         {"fit.t_max", FieldType::real, false}});
  } else if (kind == "pcs") {
    add(grid_schema());
    add({{"pcs.lambda", FieldType::real, true},
         {"pcs.chi1", FieldType::real, true},
         {"pcs.chi2", FieldType::real, true},
         {"pcs.chi3", FieldType::real, true},
         {"pcs.a3", FieldType::real, true},
         {"pcs.a4", FieldType::real, true},
         {"pcs.a5", FieldType::real, true},
         {"pcs.family_scale", FieldType::real, false},
         {"pcs.dz", FieldType::real, true},
         {"pcs.z_end", FieldType::real, true},
         {"pcs.snapshot_stride", FieldType::integer, false}});
  } else if (kind == "wavelet") {
    add({{"signal.input", FieldType::text, false},
         {"signal.kind", FieldType::text, false},
         {"signal.n", FieldType::integer, false},
         {"signal.dt", FieldType::real, false},
         {"signal.amplitude", FieldType::real, false},
         {"signal.width", FieldType::real, false},
         {"signal.noise", FieldType::real, false},
         {"wavelet.filter", FieldType::text, true},
         {"wavelet.levels", FieldType::integer, true},
         {"wavelet.keep_fraction", FieldType::real, true},
         {"wft.window", FieldType::integer, false},
         {"wft.hop", FieldType::integer, false}});
  } else {
    throw config_error("unknown scenario kind: " + kind);
  }
  return s;
}

inline void validate_against_schema(const Config& cfg, const std::vector<FieldSpec>& schema) {
  std::set<std::string> known;
  for (const auto& f : schema) known.insert(f.key);
  for (const auto& key : cfg.keys())
    if (!known.count(key))
      throw config_error(cfg.origin() + ": unknown key `" + key + "`");
  for (const auto& f : schema) {
    if (!cfg.has(f.key)) {
      if (f.required)
        throw config_error(cfg.origin() + ": missing required key `" + f.key + "` (" +
                           to_string(f.type) + ")");
      continue;
    }
    switch (f.type) { // typed access throws config_error naming key and type
      case FieldType::integer: cfg.get_int(f.key); break;
      case FieldType::real: cfg.get_double(f.key); break;
      case FieldType::boolean: cfg.get_bool(f.key); break;
      case FieldType::text: cfg.get_string(f.key); break;
    }
  }
}

} // namespace detail

// Parses and schema-checks a config without running it.
inline void validate_scenario(const Config& cfg) {
  const std::string kind = cfg.get_string("scenario.kind");
  if (std::find(scenario_kinds().begin(), scenario_kinds().end(), kind) == scenario_kinds().end())
    throw config_error(cfg.origin() + ": unknown scenario kind `" + kind + "`");
  detail::validate_against_schema(cfg, detail::schema_for(kind));
}

// ---------------------------------------------------------------------------
// Run reports
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

struct RunReport {
  std::string scenario;
  double wall_time_s = 0.0;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifact_paths;

  bool all_passed() const {
    for (auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

enum class ReportFormat { text, csv };

inline void emit_report(const RunReport& r, ReportFormat format, std::ostream& os) {
  if (format == ReportFormat::csv) {
    os << "check,pass,measured,tolerance\n";
    for (const auto& c : r.checks)
      os << c.name << ',' << (c.pass ? 1 : 0) << ',' << format_double(c.measured) << ','
         << format_double(c.tolerance) << '\n';
    return;
  }
  os << "scenario: " << r.scenario << "\n";
  os << "wall_time_s: " << r.wall_time_s << "\n";
  for (const auto& c : r.checks)
    os << (c.pass ? "  [PASS] " : "  [FAIL] ") << c.name << "  measured=" << format_double(c.measured)
       << " tolerance=" << format_double(c.tolerance) << "\n";
  os << "artifacts:\n";
  for (const auto& a : r.artifact_paths) os << "  " << a << "\n";
}

namespace detail {

class CheckList {
public:
  void add(const std::string& name, bool pass, double measured, double tolerance) {
    if (seen_.count(name)) throw validation_error("duplicate check name: " + name);
    seen_.insert(name);
    checks_.push_back({name, pass, measured, tolerance});
  }

  // Pass iff |measured| <= tolerance.
  void add_abs(const std::string& name, double measured, double tolerance) {
    add(name, std::abs(measured) <= tolerance, measured, tolerance);
  }

  std::vector<CheckResult> take() { return std::move(checks_); }

private:
  std::set<std::string> seen_;
  std::vector<CheckResult> checks_;
};

inline std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

inline std::ofstream open_artifact(const std::string& dir, const std::string& file,
                                   std::vector<std::string>& artifact_paths) {
  const std::string path = join_path(dir, file);
  std::ofstream os(path);
  if (!os) throw config_error("cannot open output file: " + path);
  artifact_paths.push_back(path);
  return os;
}

inline Grid1D grid_from(const Config& cfg) {
  return make_grid(static_cast<int>(cfg.get_int("grid.n")), cfg.get_double("grid.length"),
                   cfg.get_double("grid.x0"));
}

// ------------------------------ kdv ---------------------------------------

inline void run_kdv(const Config& cfg, const std::string& out, RunReport& report) {
  const Grid1D grid = grid_from(cfg);
  const auto run_cfg = make_kdv_config(grid, cfg.get_double("kdv.dt"), cfg.get_double("kdv.t_end"),
                                       cfg.get_bool_or("kdv.dealias", true),
                                       static_cast<int>(cfg.get_int_or("kdv.snapshot_stride", 200)));

  const bool two = cfg.has("kdv.c1");
  if (two != cfg.has("kdv.center1"))
    throw config_error("kdv.c1 and kdv.center1 must be given together");

  KdvSolitonSpec s0{cfg.get_double("kdv.c0"), cfg.get_double("kdv.center0")};
  RealField u0 = kdv_soliton_profile(s0, 0.0, grid);
  if (two) {
    KdvSolitonSpec s1{cfg.get_double("kdv.c1"), cfg.get_double("kdv.center1")};
    const RealField u1 = kdv_soliton_profile(s1, 0.0, grid);
    u0.samples += u1.samples;
  }

  const KdvTrajectory traj = kdv_propagate(u0, run_cfg);

  {
    auto os = open_artifact(out, "summary.csv", report.artifact_paths);
    os << "t,mass,momentum,peak_value,peak_x\n";
    for (const auto& s : traj.snapshots)
      os << format_double(s.t) << ',' << format_double(s.mass) << ',' << format_double(s.momentum)
         << ',' << format_double(s.peak_value) << ',' << format_double(s.peak_x) << '\n';
  }
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "snapshot_%04zu.csv", i);
    auto os = open_artifact(out, name, report.artifact_paths);
    write_field_csv(os, traj.snapshots[i].field);
  }

  CheckList checks;
  checks.add_abs("mass_drift_rel", traj.mass_drift(), 1e-6);
  checks.add_abs("momentum_drift_rel", traj.momentum_drift(), 1e-6);
  if (!two) {
    const RealField exact = kdv_soliton_profile(s0, traj.back().t, grid);
    const double linf = (traj.back().field.samples - exact.samples).abs().maxCoeff();
    checks.add_abs("linf_vs_analytic", linf, 1e-4);
  } else {
    const KdvCollisionReport rep = kdv_collision_report(traj);
    const double amp_slow = rep.pulses[0].amplitude_before;
    const double amp_fast = rep.pulses[1].amplitude_before;
    checks.add_abs("slow_amplitude_rel_change",
                   (rep.pulses[0].amplitude_after - amp_slow) / amp_slow, 0.01);
    checks.add_abs("fast_amplitude_rel_change",
                   (rep.pulses[1].amplitude_after - amp_fast) / amp_fast, 0.01);
    const double product = rep.pulses[0].phase_shift * rep.pulses[1].phase_shift;
    checks.add("opposite_phase_shifts", product < 0.0, product, 0.0);
    checks.add("ordering_swapped", rep.ordering_swapped, rep.ordering_swapped ? 1.0 : 0.0, 1.0);
  }
  report.checks = checks.take();
}

// ------------------------------ nls ---------------------------------------

inline ComplexEnvelope pulse_from(const Config& cfg, const Grid1D& grid) {
  const std::string kind = cfg.get_string("pulse.kind");
  if (kind == "sech") {
    const double a = cfg.get_double_or("pulse.amplitude", 1.0);
    const double w = cfg.get_double_or("pulse.width", 1.0);
    const double c = cfg.get_double_or("pulse.center", 0.0);
    ArrayXcd q(grid.n);
    for (int i = 0; i < grid.n; ++i) q[i] = a / std::cosh((grid.x(i) - c) / w);
    return ComplexEnvelope{grid, std::move(q), 0.0};
  }
  if (kind == "gaussian") {
    const double a = cfg.get_double_or("pulse.amplitude", 1.0);
    const double w = cfg.get_double_or("pulse.width", 1.0);
    const double c = cfg.get_double_or("pulse.center", 0.0);
    ArrayXcd q(grid.n);
    for (int i = 0; i < grid.n; ++i) {
      const double t = (grid.x(i) - c) / w;
      q[i] = a * std::exp(-0.5 * t * t);
    }
    return ComplexEnvelope{grid, std::move(q), 0.0};
  }
  if (kind == "nrz") {
    return encode_nrz(cfg.get_string("pulse.bits"), cfg.get_double_or("pulse.rho0", 1.0),
                      cfg.get_double_or("pulse.bit_width", 4.0), cfg.get_double_or("pulse.rise", 0.25),
                      grid, cfg.get_double_or("pulse.phase_mod_slope", 0.0));
  }
  throw config_error("pulse.kind must be sech, gaussian or nrz, got `" + kind + "`");
}

inline void run_nls(const Config& cfg, const std::string& out, RunReport& report) {
  const Grid1D grid = grid_from(cfg);
  const ComplexEnvelope q0 = pulse_from(cfg, grid);
  NlsParams p{cfg.get_double("nls.beta2"), cfg.get_double("nls.nu"), cfg.get_double("nls.dz"),
              cfg.get_double("nls.z_end")};

  std::optional<GuidingFilter> filter;
  if (cfg.has("filter.bandwidth")) {
    filter = GuidingFilter{cfg.get_double_or("filter.center_freq", 0.0),
                           cfg.get_double("filter.bandwidth"), cfg.get_double_or("filter.gain", 1.0),
                           cfg.get_double_or("filter.span", 10.0 * p.dz)};
  }

  const int stride = static_cast<int>(cfg.get_int_or("nls.snapshot_stride", 500));
  const NlsTrajectory traj = nls_propagate(q0, p, filter, stride);
  const SteepeningMetric steep = steepening_metric(traj);

  {
    auto os = open_artifact(out, "nls_summary.csv", report.artifact_paths);
    os << "z,power,peak_amp,max_gradient\n";
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i)
      os << format_double(traj.snapshots[i].z) << ',' << format_double(traj.snapshots[i].power)
         << ',' << format_double(traj.snapshots[i].field.samples.abs().maxCoeff()) << ','
         << format_double(steep.max_gradient[i]) << '\n';
  }
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "snapshot_%04zu.csv", i);
    auto os = open_artifact(out, name, report.artifact_paths);
    write_field_csv(os, traj.snapshots[i].field);
  }

  CheckList checks;
  if (!filter) {
    checks.add_abs("power_drift_rel", traj.power_drift(), 1e-10);
  } else if (filter->gain == 1.0) {
    double worst_gain = 0.0;
    for (std::size_t i = 1; i < traj.snapshots.size(); ++i)
      worst_gain = std::max(worst_gain, traj.snapshots[i].power - traj.snapshots.front().power);
    checks.add("power_never_increases", worst_gain <= 1e-12 * traj.snapshots.front().power,
               worst_gain, 0.0);
  }
  if (cfg.has("checks.soliton_shape_tol")) {
    double linf = 0.0;
    for (int i = 0; i < grid.n; ++i)
      linf = std::max(linf, std::abs(std::abs(traj.back().field.samples[i]) -
                                     std::abs(q0.samples[i])));
    checks.add_abs("soliton_shape_linf", linf, cfg.get_double("checks.soliton_shape_tol"));
  }
  if (cfg.has("checks.steepening_min_growth")) {
    const double z_star = cfg.get_double_or("checks.steepening_z_star", p.z_end);
    const double min_growth = cfg.get_double("checks.steepening_min_growth");
    double growth = 0.0;
    for (std::size_t i = 0; i < steep.z.size(); ++i)
      if (steep.z[i] <= z_star + 1e-12)
        growth = std::max(growth, steep.max_gradient[i] / steep.max_gradient.front());
    checks.add("steepening_growth", growth >= min_growth, growth, min_growth);
  }
  report.checks = checks.take();
}

// ------------------------------ wdm ---------------------------------------

inline void run_wdm(const Config& cfg, const std::string& out, RunReport& report) {
  const Grid1D grid = grid_from(cfg);
  NlsParams p{cfg.get_double("nls.beta2"), cfg.get_double("nls.nu"), cfg.get_double("nls.dz"),
              cfg.get_double("nls.z_end")};

  auto sech_channel = [&](const std::string& section) {
    const double a = cfg.get_double(section + ".amplitude");
    const double w = cfg.get_double(section + ".width");
    const double c = cfg.get_double(section + ".center");
    ArrayXcd q(grid.n);
    for (int i = 0; i < grid.n; ++i) q[i] = a / std::cosh((grid.x(i) - c) / w);
    return ComplexEnvelope{grid, std::move(q), cfg.get_double(section + ".omega")};
  };

  WdmConfig wdm;
  wdm.channels = {sech_channel("channel0"), sech_channel("channel1")};
  wdm.alpha = cfg.get_double("wdm.alpha");
  const double gamma = cfg.get_double("wdm.gamma");
  wdm.xpm_matrix = Eigen::MatrixXd::Constant(2, 2, gamma);
  wdm.xpm_matrix(0, 0) = wdm.xpm_matrix(1, 1) = 1.0;

  const int stride = static_cast<int>(cfg.get_int_or("nls.snapshot_stride", 1000));
  const WdmResult result = wdm_propagate(wdm, p, stride);

  {
    auto os = open_artifact(out, "wdm_summary.csv", report.artifact_paths);
    os << "z,channel,energy,center_t,mean_freq,peak_amp\n";
    for (const auto& row : result.summary)
      os << format_double(row.z) << ',' << row.channel << ',' << format_double(row.energy) << ','
         << format_double(row.center_t) << ',' << format_double(row.mean_freq) << ','
         << format_double(row.peak_amp) << '\n';
  }
  for (int j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < result.channels[j].snapshots.size(); ++i) {
      char name[48];
      std::snprintf(name, sizeof(name), "channel%d_snapshot_%04zu.csv", j, i);
      auto os = open_artifact(out, name, report.artifact_paths);
      write_field_csv(os, result.channels[j].snapshots[i].field);
    }

  CheckList checks;
  std::array<double, 2> shift{};
  for (int j = 0; j < 2; ++j) {
    const auto& tr = result.channels[j];
    const double e0 = channel_energy(tr.front().field);
    const double e1 = channel_energy(tr.back().field);
    checks.add_abs("channel" + std::to_string(j) + "_energy_drift_rel", (e1 - e0) / e0, 1e-8);
    const double velocity = p.beta2 * wdm.channels[j].carrier_offset;
    shift[j] = envelope_center(tr.back().field) -
               (envelope_center(tr.front().field) + velocity * tr.back().z);
  }
  checks.add("opposite_center_shifts", shift[0] * shift[1] < 0.0, shift[0] * shift[1], 0.0);
  report.checks = checks.take();
}

// ------------------------------ collide -----------------------------------

inline void run_collide(const Config& cfg, const std::string& out, RunReport& report) {
  CollisionParams p;
  p.beta_abs = {cfg.get_double("collision.beta0"), cfg.get_double("collision.beta1")};
  p.gamma = {cfg.get_double("collision.gamma0"), cfg.get_double("collision.gamma1")};
  p.T0 = cfg.get_double("collision.T0");
  p.T1 = cfg.get_double("collision.T1");
  p.group_offset = {cfg.get_double("collision.sigma0"), cfg.get_double("collision.sigma1")};
  p.eps_D = {cfg.get_double("collision.epsD0"), cfg.get_double("collision.epsD1")};

  const CollisionOutcome run =
      simulate_collision(p, cfg.get_double("collision.separation"), cfg.get_double("collision.z_end"));

  {
    auto os = open_artifact(out, "collision.csv", report.artifact_paths);
    os << "z,omega0,omega1,t0,t1\n";
    for (const auto& s : run.trajectory)
      os << format_double(s.z) << ',' << format_double(s.omega[0]) << ','
         << format_double(s.omega[1]) << ',' << format_double(s.t[0]) << ','
         << format_double(s.t[1]) << '\n';
  }
  {
    const CrosstalkReport table = crosstalk_report({{cfg.get_string("scenario.name"), run}});
    auto os = open_artifact(out, "crosstalk.csv", report.artifact_paths);
    os << "label,abs_dt0,abs_dt1,abs_domega0,abs_domega1,complete\n";
    for (const auto& row : table.rows)
      os << row.label << ',' << format_double(row.abs_dt[0]) << ',' << format_double(row.abs_dt[1])
         << ',' << format_double(row.abs_domega[0]) << ',' << format_double(row.abs_domega[1])
         << ',' << (row.complete ? 1 : 0) << '\n';
  }

  CheckList checks;
  checks.add("collision_complete", run.complete, run.complete ? 1.0 : 0.0, 1.0);
  if (cfg.get_bool_or("checks.symmetric_net_domega", false)) {
    const double peak = std::max(run.peak_abs_omega[0], run.peak_abs_omega[1]);
    checks.add_abs("net_domega_over_peak",
                   peak > 0.0 ? std::abs(run.net_domega[0]) / peak : 0.0, 1e-6);
  }
  checks.add("nonzero_position_shift", std::abs(run.net_dt[0]) > 1e-9, run.net_dt[0], 1e-9);
  report.checks = checks.take();
}

// ------------------------------ squeeze -----------------------------------

inline void run_squeeze(const Config& cfg, const std::string& out, RunReport& report,
                        std::uint64_t seed) {
  const double k1_min = cfg.get_double("sweep.kappa1_min");
  const double k1_max = cfg.get_double("sweep.kappa1_max");
  const long steps = cfg.get_int("sweep.steps");
  const double kappa2 = cfg.get_double("sweep.kappa2");
  if (steps < 2) throw config_error("sweep.steps must be >= 2");

  {
    auto os = open_artifact(out, "squeeze_sweep.csv", report.artifact_paths);
    os << "kappa1,kappa2,var_hyper,var_steady,squeezing_pct\n";
    for (long i = 0; i < steps; ++i) {
      const double k1 = k1_min + (k1_max - k1_min) * double(i) / double(steps - 1);
      const RamanCouplings k{k1, kappa2};
      const double vh = variance_hypertransient(k);
      const double vs = variance_steady_state(k);
      os << format_double(k1) << ',' << format_double(kappa2) << ',' << format_double(vh) << ','
         << format_double(vs) << ',' << format_double(squeezing_percent(vs)) << '\n';
    }
  }

  CheckList checks;
  checks.add_abs("steady_state_no_squeezing_boundary",
                 variance_steady_state({0.0, kappa2}) - 0.5, 0.0);
  checks.add_abs("hypertransient_equal_couplings", variance_hypertransient({kappa2, kappa2}), 0.0);
  checks.add_abs("steady_state_equal_couplings", variance_steady_state({kappa2, kappa2}) - 0.125,
                 1e-15);

  // Bogoliubov invariant and variance bound over a (gz, eta) grid.
  double worst_invariant = 0.0;
  double worst_excess = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const SqueezeParams sp = squeeze_from_gain(0.25 * i, 1.0, 2.0 * pi * j / 10.0);
      worst_invariant =
          std::max(worst_invariant, std::abs(std::norm(sp.U) - std::norm(sp.V) - 1.0));
      worst_excess = std::max(worst_excess, min_quadrature_variance(sp) - 0.5);
    }
  checks.add_abs("bogoliubov_invariant_defect", worst_invariant, 1e-12);
  checks.add("variance_below_vacuum", worst_excess <= 0.0, worst_excess, 0.0);

  checks.add_abs("dirichlet_z1_rel_error",
                 (dirichlet_null_energy(1.0) - (-1.0 / (16.0 * pi * pi))) / (1.0 / (16.0 * pi * pi)),
                 1e-12);

  if (cfg.get_bool_or("fit.enabled", false)) {
    std::vector<std::pair<double, double>> series;
    double true_amplitude = 0.0;
    double noise = 0.0;
    if (cfg.has("fit.input") && !cfg.get_string("fit.input").empty()) {
      series = read_series_csv(cfg.get_string("fit.input"));
    } else {
      const double a = cfg.get_double_or("fit.amplitude", -3.0);
      const double w = cfg.get_double_or("fit.width", 2.0);
      const double c = cfg.get_double_or("fit.center", 0.0);
      const double d = cfg.get_double_or("fit.offset", 0.0);
      noise = cfg.get_double_or("fit.noise", 0.01);
      const long m = cfg.get_int_or("fit.samples", 257);
      const double t_min = cfg.get_double_or("fit.t_min", -8.0);
      const double t_max = cfg.get_double_or("fit.t_max", 8.0);
      true_amplitude = a;
      Rng rng(seed);
      for (long i = 0; i < m; ++i) {
        const double t = t_min + (t_max - t_min) * double(i) / double(m - 1);
        const double s = 1.0 / std::cosh((t - c) / w);
        series.emplace_back(t, a * s * s + d + rng.uniform_symmetric(noise));
      }
      auto os = open_artifact(out, "fit_series.csv", report.artifact_paths);
      os << "t,value\n";
      for (auto& [t, v] : series) os << format_double(t) << ',' << format_double(v) << '\n';
    }

    const Sech2Fit fit = fit_sech2_envelope(series);
    {
      auto os = open_artifact(out, "sech2_fit.csv", report.artifact_paths);
      os << "parameter,value\n";
      os << "amplitude," << format_double(fit.amplitude) << '\n';
      os << "width," << format_double(fit.width) << '\n';
      os << "center," << format_double(fit.center) << '\n';
      os << "offset," << format_double(fit.offset) << '\n';
      os << "rms_residual," << format_double(fit.rms_residual) << '\n';
      os << "converged," << (fit.converged ? 1 : 0) << '\n';
    }
    checks.add("fit_converged", fit.converged, fit.converged ? 1.0 : 0.0, 1.0);
    if (true_amplitude != 0.0) {
      checks.add_abs("fit_amplitude_error", fit.amplitude - true_amplitude, 0.05);
      // Uniform noise of amplitude eps has rms eps/sqrt(3).
      checks.add_abs("fit_residual_vs_noise", fit.rms_residual, 2.0 * noise / std::sqrt(3.0) + 1e-9);
    }
  }
  report.checks = checks.take();
}

// ------------------------------ pcs ----------------------------------------

inline void run_pcs(const Config& cfg, const std::string& out, RunReport& report) {
  const Grid1D grid = grid_from(cfg);
  const double lambda = cfg.get_double("pcs.lambda");
  PcsParams p{4.0 * lambda * lambda,
              4.0 * lambda * lambda,
              cfg.get_double("pcs.chi1"),
              cfg.get_double("pcs.chi2"),
              cfg.get_double("pcs.chi3"),
              lambda};

  const double a3 = cfg.get_double("pcs.a3");
  const double a4 = cfg.get_double("pcs.a4");
  const double a5 = cfg.get_double("pcs.a5");
  const double scale = cfg.get_double_or("pcs.family_scale", 1.0);

  const PcsStationaryResult configured = pcs_stationary_amplitudes(p, a3, a4, a5, scale);
  // Simple-soliton branch A3 = 6 lambda^2 / chi1 for comparison, when defined.
  std::optional<PcsStationaryResult> simple;
  if (p.chi1 != 0.0)
    simple = pcs_stationary_amplitudes(p, 6.0 * lambda * lambda / p.chi1, 0.0, 0.0, scale);

  {
    auto os = open_artifact(out, "pcs_branches.csv", report.artifact_paths);
    os << "lambda,chi1,chi2,chi3,A1,A2,A3,A4,A5,residual,branch_type\n";
    auto row = [&](const PcsStationaryResult& r) {
      os << format_double(lambda) << ',' << format_double(p.chi1) << ',' << format_double(p.chi2)
         << ',' << format_double(p.chi3);
      for (int i = 0; i < 5; ++i) os << ',' << format_double(r.amplitudes.a[i]);
      os << ',' << format_double(r.algebraic_residual) << ',' << to_string(r.branch) << '\n';
    };
    row(configured);
    if (simple) row(*simple);
  }

  const auto fields = assemble_pcs_fields(configured.amplitudes, lambda, grid);
  const double grid_residual = pcs_grid_residual(fields, p);

  const std::array<RealField, 3> drivers{fields[2], fields[3], fields[4]};
  const ComplexEnvelope u1{grid, fields[0].samples.cast<complexd>(), 0.0};
  const ComplexEnvelope u2{grid, fields[1].samples.cast<complexd>(), 0.0};
  const PcsTrajectory traj =
      pcs_propagate(u1, u2, drivers, p, cfg.get_double("pcs.z_end"), cfg.get_double("pcs.dz"),
                    static_cast<int>(cfg.get_int_or("pcs.snapshot_stride", 2000)));

  double drift = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    drift = std::max(drift, std::abs(traj.snapshots.back().u1.samples[i] - u1.samples[i]));
    drift = std::max(drift, std::abs(traj.snapshots.back().u2.samples[i] - u2.samples[i]));
  }

  {
    auto os = open_artifact(out, "u1_final.csv", report.artifact_paths);
    write_field_csv(os, traj.snapshots.back().u1);
  }
  {
    auto os = open_artifact(out, "u2_final.csv", report.artifact_paths);
    write_field_csv(os, traj.snapshots.back().u2);
  }

  CheckList checks;
  checks.add_abs("algebraic_residual", configured.algebraic_residual, 1e-12);
  if (simple) checks.add_abs("simple_branch_residual", simple->algebraic_residual, 1e-12);
  checks.add_abs("grid_residual", grid_residual, 1e-10);
  checks.add_abs("stationary_drift", drift, 1e-3);
  report.checks = checks.take();
}

// ------------------------------ wavelet ------------------------------------

inline void run_wavelet(const Config& cfg, const std::string& out, RunReport& report,
                        std::uint64_t seed) {
  ArrayXd signal;
  double dt = cfg.get_double_or("signal.dt", 1.0);
  std::vector<double> times;
  if (cfg.has("signal.input") && !cfg.get_string("signal.input").empty()) {
    const auto series = read_series_csv(cfg.get_string("signal.input"));
    if (series.size() < 8 || !is_power_of_two(static_cast<long>(series.size())))
      throw config_error("input series length must be a power of two >= 8");
    signal.resize(static_cast<int>(series.size()));
    for (std::size_t i = 0; i < series.size(); ++i) {
      times.push_back(series[i].first);
      signal[static_cast<int>(i)] = series[i].second;
    }
    if (series.size() >= 2) dt = series[1].first - series[0].first;
  } else {
    const long n = cfg.get_int_or("signal.n", 1024);
    if (!is_power_of_two(n) || n < 8)
      throw config_error("signal.n must be a power of two >= 8");
    const std::string kind = cfg.get_string_or("signal.kind", "sech2");
    const double amplitude = cfg.get_double_or("signal.amplitude", 1.0);
    const double width = cfg.get_double_or("signal.width", 1.5);
    const double noise = cfg.get_double_or("signal.noise", 0.0);
    Rng rng(seed);
    signal.resize(static_cast<int>(n));
    for (long i = 0; i < n; ++i) {
      const double t = (double(i) - double(n) / 2.0) * dt;
      times.push_back(t);
      double v = 0.0;
      if (kind == "sech2") {
        const double s = 1.0 / std::cosh(t / width);
        v = amplitude * s * s;
      } else if (kind == "step") {
        v = t >= 0.0 ? amplitude : 0.0;
      } else if (kind == "sine") {
        v = amplitude * std::sin(2.0 * pi * t / width);
      } else {
        throw config_error("signal.kind must be sech2, step or sine, got `" + kind + "`");
      }
      signal[static_cast<int>(i)] = v + (noise > 0.0 ? rng.uniform_symmetric(noise) : 0.0);
    }
  }

  const WaveletFilter filter = filters::by_name(cfg.get_string("wavelet.filter"));
  const int levels = static_cast<int>(cfg.get_int("wavelet.levels"));
  const double keep = cfg.get_double("wavelet.keep_fraction");

  const DwtResult coeffs = dwt_forward(signal, filter, levels);
  const ArrayXd roundtrip = dwt_inverse(coeffs, filter);
  const CompressionResult compressed = compress_threshold(coeffs, keep);
  const ArrayXd reconstructed = dwt_inverse(compressed.result, filter);

  {
    auto os = open_artifact(out, "coeffs.csv", report.artifact_paths);
    os << "level,index,value\n";
    for (int l = 0; l < coeffs.levels; ++l)
      for (int i = 0; i < coeffs.details[l].size(); ++i)
        os << (l + 1) << ',' << i << ',' << format_double(coeffs.details[l][i]) << '\n';
    for (int i = 0; i < coeffs.approx.size(); ++i)
      os << 0 << ',' << i << ',' << format_double(coeffs.approx[i]) << '\n';
  }
  {
    auto os = open_artifact(out, "reconstruction.csv", report.artifact_paths);
    os << "t,value\n";
    for (int i = 0; i < reconstructed.size(); ++i)
      os << format_double(times[i]) << ',' << format_double(reconstructed[i]) << '\n';
  }
  if (cfg.has("wft.window")) {
    const Spectrogram sg = wft_spectrogram(signal, static_cast<int>(cfg.get_int("wft.window")),
                                           static_cast<int>(cfg.get_int_or("wft.hop", 1)));
    auto os = open_artifact(out, "spectrogram.csv", report.artifact_paths);
    for (std::size_t j = 0; j < sg.bin_centers.size(); ++j)
      os << (j ? "," : "") << format_double(sg.bin_centers[j] / dt);
    os << '\n';
    for (int f = 0; f < sg.magnitudes.rows(); ++f) {
      for (int j = 0; j < sg.magnitudes.cols(); ++j)
        os << (j ? "," : "") << format_double(sg.magnitudes(f, j));
      os << '\n';
    }
  }

  CheckList checks;
  checks.add_abs("perfect_reconstruction_linf", (roundtrip - signal).abs().maxCoeff(), 1e-10);
  const double energy = signal.square().sum();
  checks.add_abs("parseval_rel_defect", (coeffs.energy() - energy) / std::max(energy, 1e-300), 1e-10);
  const double measured_err = std::sqrt((reconstructed - signal).square().sum());
  checks.add_abs("threshold_error_bound_defect", measured_err - compressed.l2_error_bound, 1e-10);
  report.checks = checks.take();
}

} // namespace detail

// Reference configs written by `demo <kind>`.
inline std::string demo_config(const std::string& kind) {
  if (kind == "kdv")
    return "[scenario]\n"
           "kind = kdv\n"
           "name = kdv_two_soliton\n"
           "seed = 1\n\n"
           "[grid]\n"
           "n = 1024\n"
           "length = 120\n"
           "x0 = -60\n\n"
           "[kdv]\n"
           "dt = 0.004\n"
           "t_end = 45\n"
           "snapshot_stride = 2500\n"
           "c0 = 2\n"
           "center0 = -20\n"
           "c1 = 1\n"
           "center1 = 5\n";
  if (kind == "nls")
    return "[scenario]\n"
           "kind = nls\n"
           "name = nls_bright_soliton\n"
           "seed = 1\n\n"
           "[grid]\n"
           "n = 512\n"
           "length = 64\n"
           "x0 = -32\n\n"
           "[nls]\n"
           "beta2 = 1\n"
           "nu = 1\n"
           "dz = 0.002\n"
           "z_end = 10\n"
           "snapshot_stride = 1000\n\n"
           "[pulse]\n"
           "kind = sech\n"
           "amplitude = 1\n"
           "width = 1\n"
           "center = 0\n\n"
           "[checks]\n"
           "soliton_shape_tol = 1e-6\n";
  if (kind == "wdm")
    return "[scenario]\n"
           "kind = wdm\n"
           "name = wdm_two_channel_collision\n"
           "seed = 1\n\n"
           "[grid]\n"
           "n = 1024\n"
           "length = 80\n"
           "x0 = -40\n\n"
           "[nls]\n"
           "beta2 = 1\n"
           "nu = 1\n"
           "dz = 0.002\n"
           "z_end = 10\n"
           "snapshot_stride = 2500\n\n"
           "[wdm]\n"
           "alpha = 1\n"
           "gamma = 1\n\n"
           "[channel0]\n"
           "omega = 2\n"
           "amplitude = 1\n"
           "width = 1\n"
           "center = -10\n\n"
           "[channel1]\n"
           "omega = -2\n"
           "amplitude = 1\n"
           "width = 1\n"
           "center = 10\n";
  if (kind == "collide")
    return "[scenario]\n"
           "kind = collide\n"
           "name = symmetric_complete_collision\n"
           "seed = 1\n\n"
           "[collision]\n"
           "beta0 = 1\n"
           "beta1 = 1\n"
           "gamma0 = 1\n"
           "gamma1 = 1\n"
           "T0 = 1\n"
           "T1 = 1\n"
           "sigma0 = 0.5\n"
           "sigma1 = -0.5\n"
           "epsD0 = 0.5\n"
           "epsD1 = 0.5\n"
           "separation = 20\n"
           "z_end = 100\n\n"
           "[checks]\n"
           "symmetric_net_domega = true\n";
  if (kind == "squeeze")
    return "[scenario]\n"
           "kind = squeeze\n"
           "name = squeeze_sweep_and_fit\n"
           "seed = 7\n\n"
           "[sweep]\n"
           "kappa1_min = 0\n"
           "kappa1_max = 3\n"
           "steps = 31\n"
           "kappa2 = 3\n\n"
           "[fit]\n"
           "enabled = true\n"
           "amplitude = -3\n"
           "width = 2\n"
           "center = 0\n"
           "offset = 0\n"
           "noise = 0.01\n"
           "samples = 257\n"
           "t_min = -8\n"
           "t_max = 8\n";
  if (kind == "pcs")
    return "[scenario]\n"
           "kind = pcs\n"
           "name = pcs_degenerate_family\n"
           "seed = 1\n\n"
           "[grid]\n"
           "n = 512\n"
           "length = 40\n"
           "x0 = -20\n\n"
           "[pcs]\n"
           "lambda = 1\n"
           "chi1 = 1\n"
           "chi2 = 1\n"
           "chi3 = 1\n"
           "a3 = 3\n"
           "a4 = 3\n"
           "a5 = 3\n"
           "family_scale = 2\n"
           "dz = 0.00025\n"
           "z_end = 5\n"
           "snapshot_stride = 10000\n";
  if (kind == "wavelet")
    return "[scenario]\n"
           "kind = wavelet\n"
           "name = wavelet_pulse_compression\n"
           "seed = 11\n\n"
           "[signal]\n"
           "kind = sech2\n"
           "n = 1024\n"
           "dt = 0.05\n"
           "amplitude = 1\n"
           "width = 1.5\n"
           "noise = 0\n\n"
           "[wavelet]\n"
           "filter = coif1\n"
           "levels = 6\n"
           "keep_fraction = 0.1\n\n"
           "[wft]\n"
           "window = 128\n"
           "hop = 64\n";
  throw config_error("unknown scenario kind: " + kind);
}

// Executes a parsed scenario. Artifacts land in `out_override` when given,
// else in the config's `scenario.out`, else in `./<scenario name>`.
inline RunReport run_scenario(const Config& cfg,
                              const std::optional<std::string>& out_override = std::nullopt) {
  validate_scenario(cfg);
  const std::string kind = cfg.get_string("scenario.kind");
  const std::string name = cfg.get_string("scenario.name");
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int_or("scenario.seed", 0));

  std::string out = out_override ? *out_override : cfg.get_string_or("scenario.out", name);
  std::filesystem::create_directories(out);

  RunReport report;
  report.scenario = name;

  const auto start = std::chrono::steady_clock::now();
  if (kind == "kdv") detail::run_kdv(cfg, out, report);
  else if (kind == "nls") detail::run_nls(cfg, out, report);
  else if (kind == "wdm") detail::run_wdm(cfg, out, report);
  else if (kind == "collide") detail::run_collide(cfg, out, report);
  else if (kind == "squeeze") detail::run_squeeze(cfg, out, report, seed);
  else if (kind == "pcs") detail::run_pcs(cfg, out, report);
  else if (kind == "wavelet") detail::run_wavelet(cfg, out, report, seed);
  else throw config_error("unknown scenario kind: " + kind);
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline RunReport run_scenario_file(const std::string& config_path,
                                   const std::optional<std::string>& out_override = std::nullopt) {
  return run_scenario(Config::parse_file(config_path), out_override);
}

} // namespace solwave
