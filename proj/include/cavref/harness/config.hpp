#pragma once
/** @file config.hpp
 *  @brief Key-value run configuration.
 *
 *  One `key = value` per line, `#` starts a comment. All physical inputs are in
 *  units of a reference rate (normally kappa). Unknown keys are errors.
 */

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "../plan.hpp"
#include "../stochastic.hpp"
#include "../system.hpp"

namespace cavref::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepAxis {
  std::string parameter = "omega_rabi";
  double min = 0.0;
  double max = 5.0;
  std::size_t steps = 101;
};

struct RunConfig {
  std::string experiment;
  SystemParams system = default_system();
  PlanOptions plan;
  double phi = 0.25 * pi;
  SweepAxis sweep;
  std::size_t n_traj = 100;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  NoiseClosure closure = NoiseClosure::self_consistent;
  double dark_energy_offset = 0.0;
  double prep_rabi = 1.0;          ///< classical Rabi frequency preparing the dark state
  double prep_duration = 0.5 * pi; ///< pulse duration; area pi/2 by default
  std::string out_dir;

  static SystemParams default_system() {
    SystemParams p;
    p.kappa = 1.0;
    p.mu_c = 0.1;
    p.gamma_e = 0.5;
    return p;
  }

  /// Canonical `key=value` lines of every setting, sorted by key.
  std::string canonical() const {
    std::ostringstream os;
    os.precision(17);
    for (const auto& [k, v] : values()) os << k << '=' << v << '\n';
    return os.str();
  }

  std::map<std::string, std::string> values() const {
    std::map<std::string, std::string> m;
    auto num = [](double d) {
      std::ostringstream os;
      os.precision(17);
      os << d;
      return os.str();
    };
    m["experiment"] = experiment;
    m["kappa"] = num(system.kappa);
    m["mu_c"] = num(system.mu_c);
    m["gamma_e"] = num(system.gamma_e);
    m["gamma_el"] = num(system.gamma_el);
    m["omega_rabi"] = num(std::abs(system.omega_rabi));
    m["omega_rabi_phase"] = num(std::arg(system.omega_rabi));
    m["delta_0"] = num(system.delta_0);
    m["delta_e"] = num(system.delta_e);
    m["omega_c"] = num(system.omega_c);
    m["phi"] = num(phi);
    m["plan.bandwidth_fraction"] = num(plan.bandwidth_fraction);
    m["plan.bandwidth"] = plan.bandwidth ? num(*plan.bandwidth) : "auto";
    m["plan.min_modes"] = std::to_string(plan.min_modes);
    m["plan.resonance_cover"] = num(plan.resonance_cover);
    m["plan.damping_cover"] = num(plan.damping_cover);
    m["plan.center_detuning"] = plan.center_detuning ? num(*plan.center_detuning) : "carrier";
    m["plan.separation_factor"] = num(plan.separation_factor);
    m["plan.tail_decay_times"] = num(plan.tail_decay_times);
    m["plan.dt_safety"] = num(plan.dt_safety);
    m["pulse.e1"] = num(std::abs(plan.e1));
    m["pulse.e2"] = num(std::abs(plan.e2));
    m["pulse.relative_phase"] = num(std::arg(plan.e2) - std::arg(plan.e1));
    m["sweep.parameter"] = sweep.parameter;
    m["sweep.min"] = num(sweep.min);
    m["sweep.max"] = num(sweep.max);
    m["sweep.steps"] = std::to_string(sweep.steps);
    m["n_traj"] = std::to_string(n_traj);
    m["seed"] = std::to_string(seed);
    m["noise.closure"] = closure == NoiseClosure::reference ? "reference" : "self_consistent";
    m["dark.energy_offset"] = num(dark_energy_offset);
    m["prep.rabi"] = num(prep_rabi);
    m["prep.duration"] = num(prep_duration);
    return m;
  }

  void validate() const {
    try {
      system.validate();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (sweep.steps < 2) throw ConfigError("sweep.steps must be at least 2");
    if (!(sweep.max > sweep.min)) throw ConfigError("sweep.max must exceed sweep.min");
    if (n_traj < 1) throw ConfigError("n_traj must be at least 1");
    if (!(plan.bandwidth_fraction > 0.0) || plan.bandwidth_fraction > 0.05)
      throw ConfigError("plan.bandwidth_fraction must lie in (0, 0.05]");
    if (std::abs(plan.e1) == 0.0 && std::abs(plan.e2) == 0.0) throw ConfigError("pulse polarization is zero");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": " + v);
  }
  if (pos != v.size() || !std::isfinite(d)) throw ConfigError("invalid number for " + key + ": " + v);
  return d;
}

inline std::uint64_t to_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("invalid non-negative integer for " + key + ": " + v);
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError("integer out of range for " + key + ": " + v);
  }
}

}  // namespace detail

/// Applies one setting; throws ConfigError for unknown keys or bad values.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  using detail::to_double;
  using detail::to_uint;
  auto set_rabi = [&](double mag, double phase) { c.system.omega_rabi = std::polar(mag, phase); };
  auto set_pol = [&](double a1, double a2, double rel) {
    c.plan.e1 = a1;
    c.plan.e2 = std::polar(a2, rel);
  };
  const std::map<std::string, std::function<void(const std::string&)>> table = {
      {"experiment", [&](const std::string& v) { c.experiment = v; }},
      {"kappa", [&](const std::string& v) { c.system.kappa = to_double(key, v); }},
      {"mu_c", [&](const std::string& v) { c.system.mu_c = to_double(key, v); }},
      {"gamma_e", [&](const std::string& v) { c.system.gamma_e = to_double(key, v); }},
      {"gamma_el", [&](const std::string& v) { c.system.gamma_el = to_double(key, v); }},
      {"omega_rabi", [&](const std::string& v) { set_rabi(to_double(key, v), std::arg(c.system.omega_rabi)); }},
      {"omega_rabi_phase", [&](const std::string& v) { set_rabi(std::abs(c.system.omega_rabi), to_double(key, v)); }},
      {"delta_0", [&](const std::string& v) { c.system.delta_0 = to_double(key, v); }},
      {"delta_e", [&](const std::string& v) { c.system.delta_e = to_double(key, v); }},
      {"omega_c", [&](const std::string& v) { c.system.omega_c = to_double(key, v); c.plan.omega_c = c.system.omega_c; }},
      {"phi", [&](const std::string& v) { c.phi = to_double(key, v); }},
      {"plan.bandwidth_fraction", [&](const std::string& v) { c.plan.bandwidth_fraction = to_double(key, v); }},
      {"plan.bandwidth",
       [&](const std::string& v) {
         if (v == "auto")
           c.plan.bandwidth.reset();
         else
           c.plan.bandwidth = to_double(key, v);
       }},
      {"plan.min_modes", [&](const std::string& v) { c.plan.min_modes = to_uint(key, v); }},
      {"plan.resonance_cover", [&](const std::string& v) { c.plan.resonance_cover = to_double(key, v); }},
      {"plan.damping_cover", [&](const std::string& v) { c.plan.damping_cover = to_double(key, v); }},
      {"plan.center_detuning",
       [&](const std::string& v) {
         if (v == "carrier")
           c.plan.center_detuning.reset();
         else
           c.plan.center_detuning = to_double(key, v);
       }},
      {"plan.separation_factor", [&](const std::string& v) { c.plan.separation_factor = to_double(key, v); }},
      {"plan.tail_decay_times", [&](const std::string& v) { c.plan.tail_decay_times = to_double(key, v); }},
      {"plan.dt_safety", [&](const std::string& v) { c.plan.dt_safety = to_double(key, v); }},
      {"pulse.e1", [&](const std::string& v) { set_pol(to_double(key, v), std::abs(c.plan.e2), std::arg(c.plan.e2)); }},
      {"pulse.e2", [&](const std::string& v) { set_pol(std::abs(c.plan.e1), to_double(key, v), std::arg(c.plan.e2)); }},
      {"pulse.relative_phase",
       [&](const std::string& v) { set_pol(std::abs(c.plan.e1), std::abs(c.plan.e2), to_double(key, v)); }},
      {"sweep.parameter", [&](const std::string& v) { c.sweep.parameter = v; }},
      {"sweep.min", [&](const std::string& v) { c.sweep.min = to_double(key, v); }},
      {"sweep.max", [&](const std::string& v) { c.sweep.max = to_double(key, v); }},
      {"sweep.steps", [&](const std::string& v) { c.sweep.steps = to_uint(key, v); }},
      {"n_traj", [&](const std::string& v) { c.n_traj = to_uint(key, v); }},
      {"seed", [&](const std::string& v) { c.seed = to_uint(key, v); }},
      {"threads", [&](const std::string& v) { c.threads = static_cast<unsigned>(to_uint(key, v)); }},
      {"noise.closure",
       [&](const std::string& v) {
         if (v == "self_consistent")
           c.closure = NoiseClosure::self_consistent;
         else if (v == "reference")
           c.closure = NoiseClosure::reference;
         else
           throw ConfigError("noise.closure must be self_consistent or reference");
       }},
      {"dark.energy_offset", [&](const std::string& v) { c.dark_energy_offset = to_double(key, v); }},
      {"prep.rabi", [&](const std::string& v) { c.prep_rabi = to_double(key, v); }},
      {"prep.duration", [&](const std::string& v) { c.prep_duration = to_double(key, v); }},
      {"out_dir", [&](const std::string& v) { c.out_dir = v; }},
  };
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown configuration key: " + key);
  it->second(value);
}

inline RunConfig parse_config(std::istream& in, RunConfig c = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    apply_setting(c, key, value);
  }
  return c;
}

inline RunConfig load_config(const std::string& path, RunConfig c = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read configuration file: " + path);
  return parse_config(in, std::move(c));
}

}  // namespace cavref::harness
