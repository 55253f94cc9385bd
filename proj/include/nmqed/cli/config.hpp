#pragma once

// Run configuration: a flat sectioned key-value file (INI), read with
// Boost.PropertyTree. Unknown sections or keys are rejected so typos never
// fall back to defaults silently.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nmqed/dynamics.hpp"
#include "nmqed/error.hpp"
#include "nmqed/fieldspec.hpp"

namespace nmqed::cli {

enum class OutputFormat { Csv, Json };
enum class Method { Volterra, Bromwich };

struct SweepAxis {
  bool active = false;
  double lo = 0.0;
  double hi = 0.0;
  int points = 0;
};

struct OracleSettings {
  int modes = 2000;
  double omega_max = 0.0; // 0 selects 20 omega~
};

struct RunConfig {
  FieldSpec field;
  AtomSpec atom;
  QubitState initial = QubitState::excited_state();
  double horizon = 0.0;
  double dt = 0.0;
  Method method = Method::Volterra;
  SweepAxis sweep;
  OracleSettings oracle;
  OutputFormat format = OutputFormat::Csv;
  std::vector<std::string> notices; // adjustments made while loading

  void require_time_grid() const {
    if (!(std::isfinite(horizon) && horizon > 0.0)) throw ConfigError("run: horizon must be > 0");
    if (!(std::isfinite(dt) && dt > 0.0)) throw ConfigError("run: dt must be > 0");
    if (dt > horizon) throw ConfigError("run: dt exceeds the horizon");
  }
};

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ConfigError("output: format must be csv or json, got '" + s + "'");
}

inline FieldKind parse_kind(const std::string& s) {
  if (s == "single_mode") return FieldKind::SingleMode;
  if (s == "free_space") return FieldKind::FreeSpace;
  if (s == "band") return FieldKind::Band;
  if (s == "cavity") return FieldKind::Cavity;
  throw ConfigError("field: unknown kind '" + s + "' (single_mode, free_space, band, cavity)");
}

namespace detail {

using boost::property_tree::ptree;

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"field", {"kind", "g", "k", "lambda2", "epsilon", "omega1", "omega2", "L"}},
      {"atom", {"omega_tilde"}},
      {"state", {"x", "y_re", "y_im"}},
      {"run", {"horizon", "dt", "method"}},
      {"sweep", {"omega_min", "omega_max", "points"}},
      {"oracle", {"modes", "omega_max"}},
      {"output", {"format"}}};
  return keys;
}

inline void check_keys(const ptree& root) {
  const auto& keys = known_keys();
  for (const auto& [section, body] : root) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config: key '" + section + "' lies outside any section");
    }
    auto it = keys.find(section);
    if (it == keys.end()) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
    }
  }
}

template <class T>
T read(const ptree& root, const std::string& path, T fallback) {
  auto node = root.get_child_optional(path);
  if (!node) return fallback;
  const std::string text = node->get_value<std::string>();
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw ConfigError("config: cannot read '" + path + "' from '" + text + "'");
  }
  return value;
}

inline bool has(const ptree& root, const std::string& path) {
  return static_cast<bool>(root.get_child_optional(path));
}

} // namespace detail

/// Shift a frequency sitting exactly on a cavity branch point n pi / L by
/// 1e-9 pi / L, recording a notice. Other kinds pass through.
inline double avoid_branch_point(const FieldSpec& field, double omega, std::vector<std::string>& notices) {
  if (field.kind != FieldKind::Cavity) return omega;
  const double unit = pi / field.cavity_L;
  const double x = omega / unit;
  const double n = std::round(x);
  if (n >= 1.0 && std::abs(x - n) <= 1e-12 * n) {
    const double moved = omega + 1e-9 * unit;
    std::ostringstream msg;
    msg.precision(12);
    msg << "notice: omega = " << omega << " is the cavity branch point " << n << " pi/L; using " << moved;
    notices.push_back(msg.str());
    return moved;
  }
  return omega;
}

inline RunConfig parse_config(std::istream& in) {
  using detail::read;
  detail::ptree root;
  try {
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  detail::check_keys(root);

  RunConfig cfg;
  if (!detail::has(root, "field.kind")) throw ConfigError("config: [field] kind is required");
  cfg.field.kind = parse_kind(root.get<std::string>("field.kind"));
  cfg.field.g = read(root, "field.g", 0.0);
  cfg.field.k = read(root, "field.k", 0.0);
  cfg.field.lambda2 = read(root, "field.lambda2", 0.0);
  cfg.field.epsilon = read(root, "field.epsilon", 0.0);
  cfg.field.omega1 = read(root, "field.omega1", 0.0);
  cfg.field.omega2 = read(root, "field.omega2", 0.0);
  cfg.field.cavity_L = read(root, "field.L", 0.0);
  cfg.field.validate();

  cfg.atom.omega_tilde = read(root, "atom.omega_tilde", 1.0);
  cfg.atom.validate();
  cfg.atom.omega_tilde = avoid_branch_point(cfg.field, cfg.atom.omega_tilde, cfg.notices);

  cfg.initial.x = read(root, "state.x", cfg.initial.x);
  cfg.initial.y = {read(root, "state.y_re", 0.0), read(root, "state.y_im", 0.0)};
  cfg.initial.validate();

  cfg.horizon = read(root, "run.horizon", 0.0);
  cfg.dt = read(root, "run.dt", 0.0);
  const std::string method = read<std::string>(root, "run.method", "volterra");
  if (method == "volterra") {
    cfg.method = Method::Volterra;
  } else if (method == "bromwich") {
    cfg.method = Method::Bromwich;
  } else {
    throw ConfigError("run: method must be volterra or bromwich, got '" + method + "'");
  }

  if (root.get_child_optional("sweep")) {
    cfg.sweep.active = true;
    cfg.sweep.lo = read(root, "sweep.omega_min", 0.0);
    cfg.sweep.hi = read(root, "sweep.omega_max", 0.0);
    cfg.sweep.points = read(root, "sweep.points", 0);
    if (!(cfg.sweep.lo > 0.0 && cfg.sweep.hi >= cfg.sweep.lo && std::isfinite(cfg.sweep.hi))) {
      throw ConfigError("sweep: need 0 < omega_min <= omega_max");
    }
    if (cfg.sweep.points < 1) throw ConfigError("sweep: points must be >= 1");
    if (cfg.sweep.points > 1 && cfg.sweep.lo == cfg.sweep.hi) {
      throw ConfigError("sweep: several points need omega_min < omega_max");
    }
  }

  cfg.oracle.modes = read(root, "oracle.modes", cfg.oracle.modes);
  cfg.oracle.omega_max = read(root, "oracle.omega_max", 0.0);
  if (cfg.oracle.modes < 1) throw ConfigError("oracle: modes must be >= 1");
  if (cfg.oracle.modes + 1 > 5000) throw ConfigError("oracle: at most 4999 modes (dense diagonalization)");
  if (cfg.oracle.omega_max < 0.0) throw ConfigError("oracle: omega_max must be > 0");

  cfg.format = parse_format(read<std::string>(root, "output.format", "csv"));
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in);
}

/// Sweep frequencies, evenly spaced and nudged off cavity branch points.
inline std::vector<double> sweep_samples(const RunConfig& cfg, std::vector<std::string>& notices) {
  if (!cfg.sweep.active) throw ConfigError("scan: the config has no [sweep] section");
  std::vector<double> out(static_cast<std::size_t>(cfg.sweep.points));
  for (int i = 0; i < cfg.sweep.points; ++i) {
    const double f = cfg.sweep.points == 1 ? 0.0 : static_cast<double>(i) / (cfg.sweep.points - 1);
    const double w = i + 1 == cfg.sweep.points ? cfg.sweep.hi : cfg.sweep.lo + f * (cfg.sweep.hi - cfg.sweep.lo);
    out[static_cast<std::size_t>(i)] = avoid_branch_point(cfg.field, w, notices);
  }
  return out;
}

} // namespace nmqed::cli
