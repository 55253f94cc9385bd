#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "nmqed/error.hpp"

namespace nmqed {

struct Mode {
  double omega; // mode frequency > 0
  double g;     // coupling >= 0
};

/// Finite list of field modes, strictly increasing in frequency.
struct ModeSet {
  std::vector<Mode> modes;

  std::size_t size() const { return modes.size(); }
  bool empty() const { return modes.empty(); }

  void validate() const {
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const auto& m = modes[i];
      if (!(std::isfinite(m.omega) && m.omega > 0.0)) {
        throw ConfigError("mode set: frequency of mode " + std::to_string(i) + " must be > 0");
      }
      if (!(std::isfinite(m.g) && m.g >= 0.0)) {
        throw ConfigError("mode set: coupling of mode " + std::to_string(i) + " must be >= 0");
      }
      if (i > 0 && !(m.omega > modes[i - 1].omega)) {
        throw ConfigError("mode set: frequencies must be strictly increasing");
      }
    }
  }

  /// Sum of g_k^2 = mu(0).
  double total_weight() const {
    double s = 0.0;
    for (const auto& m : modes) s += m.g * m.g;
    return s;
  }
};

} // namespace nmqed
