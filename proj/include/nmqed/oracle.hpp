#pragma once

// Brute-force reference: a finite set of modes, the single-excitation
// Hamiltonian they define, and its exact survival amplitude. Nothing here
// shares code with the solvers it is meant to check.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "nmqed/error.hpp"
#include "nmqed/fieldspec.hpp"
#include "nmqed/modeset.hpp"
#include "nmqed/trajectory.hpp"

namespace nmqed {

/// Midpoint-rule modes on (0, omega_max]: omega_k at cell centers,
/// g_k^2 = rho(omega_k) * d_omega. A single-mode spec passes through.
inline ModeSet discretize(const FieldSpec& spec, int N, double omega_max) {
  spec.validate();
  if (spec.kind == FieldKind::SingleMode) return ModeSet{{{spec.k, spec.g}}};
  if (N < 1) throw ConfigError("discretize: N must be >= 1");
  if (!(std::isfinite(omega_max) && omega_max > 0.0)) {
    throw DomainError("discretize: omega_max must be > 0");
  }
  const double dw = omega_max / N;
  ModeSet out;
  out.modes.reserve(N);
  for (int k = 0; k < N; ++k) {
    const double w = (k + 0.5) * dw;
    out.modes.push_back({w, std::sqrt(spectral_density(spec, w) * dw)});
  }
  return out;
}

/// F(E) = sum_k g_k^2 / (E - omega_k).
inline cplx resolvent_F(const ModeSet& modes, cplx E) {
  cplx sum = 0.0;
  for (const auto& m : modes.modes) {
    const cplx d = E - m.omega;
    if (d == cplx(0.0, 0.0)) {
      throw DomainError("resolvent_F: E coincides with mode frequency " + std::to_string(m.omega));
    }
    sum += m.g * m.g / d;
  }
  return sum;
}

/// Eigenvalues of the single-excitation Hamiltonian and the weights
/// |<excited, vacuum | E_j>|^2.
struct SpectralDecomposition {
  std::vector<double> energies;
  std::vector<double> weights;
};

inline SpectralDecomposition single_excitation_spectrum(const ModeSet& modes, const AtomSpec& atom) {
  modes.validate();
  atom.validate();
  const auto n = static_cast<Eigen::Index>(modes.size() + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  H(0, 0) = atom.omega_tilde;
  for (Eigen::Index k = 1; k < n; ++k) {
    const auto& m = modes.modes[static_cast<std::size_t>(k - 1)];
    H(k, k) = m.omega;
    H(0, k) = m.g;
    H(k, 0) = m.g;
  }
  // Dense eigenvalues; the overlap with |excited, vacuum> then follows from
  // the eigenvector (1, g_k / (E - omega_k)) normalized.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "u_exact_finite: diagonalization failed for dimension " << n
        << ", matrix norm " << H.norm();
    throw NumericalError(msg.str());
  }
  SpectralDecomposition out;
  out.energies.resize(static_cast<std::size_t>(n));
  out.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double E = eig.eigenvalues()(j);
    double norm2 = 1.0;
    bool on_mode = false;
    for (const auto& m : modes.modes) {
      const double d = E - m.omega;
      if (m.g == 0.0) continue;
      if (d == 0.0) {
        on_mode = true;
        break;
      }
      norm2 += m.g * m.g / (d * d);
    }
    out.energies[static_cast<std::size_t>(j)] = E;
    out.weights[static_cast<std::size_t>(j)] = on_mode ? 0.0 : 1.0 / norm2;
  }
  return out;
}

/// u(t) = <excited, vacuum| e^{-iHt} |excited, vacuum>.
inline UTrajectory u_exact_finite(const ModeSet& modes, const AtomSpec& atom, const TimeGrid& grid) {
  grid.validate();
  const auto spec = single_excitation_spectrum(modes, atom);
  UTrajectory out;
  out.dt = grid.dt;
  out.values.assign(grid.count, 0.0);
  for (std::size_t j = 0; j < spec.energies.size(); ++j) {
    const cplx step = std::exp(cplx(0.0, -spec.energies[j] * grid.dt));
    cplx phase = 1.0;
    for (std::size_t n = 0; n < grid.count; ++n) {
      if (n % 128 == 0) phase = std::exp(cplx(0.0, -spec.energies[j] * grid.time(n)));
      out.values[n] += spec.weights[j] * phase;
      phase *= step;
    }
  }
  return out;
}

} // namespace nmqed
