#include "seistomo/attenuation.hpp"

#include <algorithm>
#include <string>

namespace seistomo {

AttenuationField assemble_attenuation(const RegularGrid& grid, double base_gamma,
                                      const PerSideWidths& layer) {
  if (base_gamma < 0.0) throw ValidationError("attenuation: base must be nonnegative");
  for (int k = 0; k < grid.ndim; ++k) {
    if (layer.lo[k] < 0 || layer.hi[k] < 0)
      throw ValidationError("attenuation: layer widths must be nonnegative");
    if (layer.lo[k] >= grid.n[k] / 2 + 1 || layer.hi[k] >= grid.n[k] / 2 + 1)
      throw ValidationError("attenuation: layer wider than half the grid on axis " +
                            std::to_string(k));
  }
  AttenuationField f;
  f.grid = grid;
  f.base = base_gamma;
  f.layer = layer;
  f.ramp.assign(grid.num_nodes(), 0.0);
  for (std::int64_t idx = 0; idx < grid.num_nodes(); ++idx) {
    const auto c = grid.unpack(idx);
    double r = 0.0;
    for (int k = 0; k < grid.ndim; ++k) {
      if (layer.lo[k] > 0 && c[k] < layer.lo[k]) {
        const double L = layer.lo[k];
        const double d = static_cast<double>(c[k]);
        r = std::max(r, ((L - d) / L) * ((L - d) / L));
      }
      if (layer.hi[k] > 0 && c[k] > grid.n[k] - 1 - layer.hi[k]) {
        const double L = layer.hi[k];
        const double d = static_cast<double>(grid.n[k] - 1 - c[k]);
        r = std::max(r, ((L - d) / L) * ((L - d) / L));
      }
    }
    f.ramp[idx] = r;
  }
  return f;
}

}  // namespace seistomo
