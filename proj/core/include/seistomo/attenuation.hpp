#pragma once

#include "seistomo/grid.hpp"

namespace seistomo {

/// Attenuation gamma (rad/s): a constant physical base plus an absorbing
/// boundary ramp. The ramp shape is frequency independent; its magnitude
/// scales with the working frequency (gamma_max = omega), so the field
/// stores the normalized profile and evaluates gamma(omega) on demand.
struct AttenuationField {
  RegularGrid grid;
  double base = 0.0;
  PerSideWidths layer;
  Field ramp;  // in [0,1]: ((L-d)/L)^2 within each layer, max over sides

  Field gamma_at(double omega) const {
    Field g(ramp.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = base + omega * ramp[i];
    return g;
  }
};

/// Quadratic absorbing profile rising from 0 at the layer's inner edge to
/// its maximum at the boundary; sides with width 0 (free surface) get no
/// ramp.
AttenuationField assemble_attenuation(const RegularGrid& grid, double base_gamma,
                                      const PerSideWidths& layer);

}  // namespace seistomo
