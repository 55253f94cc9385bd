#pragma once

// Subcommands of the command-line tool. Each returns a numeric table and an
// exit code; writing and error reporting are left to the caller.

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmqed/cli/config.hpp"
#include "nmqed/cli/parallel.hpp"
#include "nmqed/dynamics.hpp"
#include "nmqed/oracle.hpp"
#include "nmqed/usolve.hpp"

namespace nmqed::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kSolverFailure = 2, kPartialSweep = 3, kOracleMismatch = 4 };

inline constexpr double kOracleTolerance = 1e-5;

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CommandResult {
  Table table;
  int exit_code = kOk;
  std::vector<std::string> messages; // for standard error
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

// ---- output ----

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

inline void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

/// {"command": ..., "columns": [...], "rows": [[...], ...]}; non-finite values become null.
inline void write_json(std::ostream& out, const Table& t) {
  nlohmann::ordered_json doc;
  doc["command"] = t.command;
  doc["columns"] = t.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::ordered_json::array();
    for (double v : row) {
      if (std::isfinite(v)) {
        r.push_back(v);
      } else {
        r.push_back(nullptr);
      }
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(1) << '\n';
}

inline void write_table(std::ostream& out, const Table& t, OutputFormat format) {
  if (format == OutputFormat::Json) {
    write_json(out, t);
  } else {
    write_csv(out, t);
  }
}

// ---- commands ----

namespace detail {

inline std::size_t step_count(double horizon, double dt) {
  return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

inline UTrajectory solve(const RunConfig& cfg) {
  if (cfg.method == Method::Bromwich) {
    return invert_laplace_u(cfg.field, cfg.atom, TimeGrid{cfg.dt, step_count(cfg.horizon, cfg.dt) + 1});
  }
  return solve_u_volterra(cfg.field, cfg.atom, cfg.horizon, cfg.dt);
}

// Free-space reference for the frequency shift; none for band or single mode.
inline std::optional<FieldSpec> free_reference(const FieldSpec& field) {
  if (field.kind == FieldKind::FreeSpace || field.kind == FieldKind::Cavity) {
    return FieldSpec::free_space(field.lambda2, field.epsilon);
  }
  return std::nullopt;
}

} // namespace detail

/// Time series of u, the emission probability, the propagated state and the
/// instantaneous rates.
inline CommandResult cmd_evolve(const RunConfig& cfg) {
  cfg.require_time_grid();
  const auto u = detail::solve(cfg);
  const auto rates = rates_from_u(u);
  CommandResult res;
  res.table.command = "evolve";
  res.table.columns = {"t", "re_u", "im_u", "abs_u", "p_emit", "x", "re_y", "im_y", "gamma", "omega"};
  res.table.rows.reserve(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    const cplx v = u.values[n];
    const auto state = propagate(cfg.initial, v);
    const bool has_rate = n < rates.size();
    res.table.rows.push_back({u.time(n), v.real(), v.imag(), std::abs(v), emission_probability(v), state.x,
                              state.y.real(), state.y.imag(), has_rate ? rates.gamma[n] : kMissing,
                              has_rate ? rates.omega[n] : kMissing});
  }
  if (rates.truncated) {
    res.messages.push_back("notice: |u| fell below 1e-8; rate columns are nan from there on");
  }
  return res;
}

/// One pole search per swept frequency, run in parallel and assembled in
/// sample order. Failed samples are flagged and give exit code 3.
inline CommandResult cmd_scan(const RunConfig& cfg, int threads = 0) {
  CommandResult res;
  const auto omegas = sweep_samples(cfg, res.messages);
  const auto reference = detail::free_reference(cfg.field);
  const bool cavity = cfg.field.kind == FieldKind::Cavity;

  struct Row {
    std::vector<double> values;
    std::string failure;
  };
  auto rows = parallel_map<Row>(omegas.size(), resolve_threads(threads), [&](std::size_t i) {
    const double w = omegas[i];
    const double scaled = cavity ? w * cfg.field.cavity_L / pi : kMissing;
    try {
      const Pole p = find_pole(cfg.field, AtomSpec{w});
      double shift = kMissing;
      if (reference) {
        shift = cfg.field.kind == FieldKind::FreeSpace ? 0.0 : p.Omega - find_pole(*reference, AtomSpec{w}).Omega;
      }
      return Row{{w, scaled, p.Gamma, p.Omega, shift, 1.0}, {}};
    } catch (const std::exception& e) {
      return Row{{w, scaled, kMissing, kMissing, kMissing, 0.0}, e.what()};
    }
  });

  res.table.command = "scan";
  res.table.columns = {"omega", "omega_over_pi_L", "gamma", "Omega", "delta_omega", "converged"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].failure.empty()) {
      res.exit_code = kPartialSweep;
      res.messages.push_back("row " + std::to_string(i) + " (omega = " + format_number(omegas[i]) +
                             ") flagged: " + rows[i].failure);
    }
    res.table.rows.push_back(std::move(rows[i].values));
  }
  return res;
}

/// The dominant pole for the configured atom.
inline CommandResult cmd_poles(const RunConfig& cfg) {
  const Pole p = find_pole(cfg.field, cfg.atom);
  CommandResult res;
  res.table.command = "poles";
  res.table.columns = {"omega_tilde", "Omega", "gamma", "re_residue", "im_residue", "iterations", "residual"};
  res.table.rows.push_back({cfg.atom.omega_tilde, p.Omega, p.Gamma, p.residue.real(), p.residue.imag(),
                            static_cast<double>(p.iterations), p.residual});
  return res;
}

/// Both solvers against exact diagonalization on the same discrete modes,
/// plus the gap between that discretization and the continuum solution.
inline CommandResult cmd_oracle_check(const RunConfig& cfg) {
  cfg.require_time_grid();
  const double omega_max = cfg.oracle.omega_max > 0.0 ? cfg.oracle.omega_max : 20.0 * cfg.atom.omega_tilde;
  const auto modes = discretize(cfg.field, cfg.oracle.modes, omega_max);
  const TimeGrid grid{cfg.dt, detail::step_count(cfg.horizon, cfg.dt) + 1};
  const double T = grid.last();

  const auto exact = u_exact_finite(modes, cfg.atom, grid);
  const auto volterra = solve_u_volterra(modes, cfg.atom, T, cfg.dt);
  const auto bromwich = invert_laplace_u(modes, cfg.atom, grid);
  const auto continuum = solve_u_volterra(cfg.field, cfg.atom, T, cfg.dt);

  const double dv = max_deviation(volterra, exact, T);
  const double db = max_deviation(bromwich, exact, T);
  const double gap = max_deviation(continuum, exact, T);
  const bool pass = dv < kOracleTolerance && db < kOracleTolerance;

  CommandResult res;
  res.table.command = "oracle-check";
  res.table.columns = {"modes", "omega_max", "max_dev_volterra", "max_dev_bromwich", "continuum_gap", "tolerance",
                       "pass"};
  res.table.rows.push_back({static_cast<double>(modes.size()), omega_max, dv, db, gap, kOracleTolerance,
                            pass ? 1.0 : 0.0});
  res.messages.push_back("max |u_volterra - u_oracle| = " + format_number(dv));
  res.messages.push_back("max |u_bromwich - u_oracle| = " + format_number(db));
  res.messages.push_back("continuum gap of the " + std::to_string(modes.size()) +
                         "-mode discretization = " + format_number(gap));
  res.messages.push_back(pass ? "oracle check: PASS" : "oracle check: FAIL");
  if (!pass) res.exit_code = kOracleMismatch;
  return res;
}

} // namespace nmqed::cli
