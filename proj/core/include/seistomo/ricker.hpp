#pragma once

#include <cmath>

#include "seistomo/errors.hpp"

namespace seistomo {

/// Ricker wavelet r(t) = (1 - 2 pi^2 f_M^2 t^2) exp(-pi^2 f_M^2 t^2) with
/// its closed-form Fourier transform (real, peaked at f_M).
struct RickerSource {
  double f_m = 0.0;  // peak frequency (Hz)

  explicit RickerSource(double peak_hz) : f_m(peak_hz) {
    if (!(peak_hz > 0.0)) throw ValidationError("ricker: peak frequency must be positive");
  }

  double time(double t) const {
    const double a = M_PI * M_PI * f_m * f_m;
    return (1.0 - 2.0 * a * t * t) * std::exp(-a * t * t);
  }
  /// \hat r(omega) = omega^2 / (2 sqrt(pi) pi^2 f_M^3) exp(-omega^2 / (4 pi^2 f_M^2))
  double freq(double omega) const {
    const double a = M_PI * M_PI * f_m * f_m;
    return omega * omega / (2.0 * std::sqrt(M_PI) * a * f_m) * std::exp(-omega * omega / (4.0 * a));
  }
};

}  // namespace seistomo
