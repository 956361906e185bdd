#include "seistomo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seistomo {

AcquisitionGeometry::AcquisitionGeometry(std::vector<std::array<double, 3>> src,
                                         std::vector<std::array<double, 3>> rec, double omin,
                                         double omax, const RegularGrid& core_grid)
    : sources(std::move(src)), receivers(std::move(rec)), offset_min(omin), offset_max(omax) {
  if (omin < 0.0 || omax < omin) throw ValidationError("acquisition: bad offset range");
  for (std::size_t s = 0; s < sources.size(); ++s)
    if (!core_grid.contains(sources[s]))
      throw ValidationError("acquisition: source " + std::to_string(s) + " outside core grid");
  for (std::size_t r = 0; r < receivers.size(); ++r)
    if (!core_grid.contains(receivers[r]))
      throw ValidationError("acquisition: receiver " + std::to_string(r) + " outside core grid");
  active.assign(sources.size(), std::vector<std::uint8_t>(receivers.size(), 0));
  for (std::size_t s = 0; s < sources.size(); ++s)
    for (std::size_t r = 0; r < receivers.size(); ++r) {
      double d2 = 0.0;
      for (int k = 0; k < core_grid.ndim; ++k) {
        const double dx = sources[s][k] - receivers[r][k];
        d2 += dx * dx;
      }
      const double d = std::sqrt(d2);
      active[s][r] = (d >= offset_min && d <= offset_max) ? 1 : 0;
    }
}

SamplingOperator::SamplingOperator(const AcquisitionGeometry& geom, const RegularGrid& grid)
    : grid_(grid) {
  nodes_.resize(geom.receivers.size());
  weights_.resize(geom.receivers.size());
  for (std::size_t r = 0; r < geom.receivers.size(); ++r) {
    const auto& x = geom.receivers[r];
    if (!grid.contains(x))
      throw ValidationError("sampling: receiver " + std::to_string(r) + " outside grid");
    std::array<std::int64_t, 3> base{0, 0, 0};
    std::array<double, 3> t{0.0, 0.0, 0.0};
    for (int k = 0; k < grid.ndim; ++k) {
      double f = (x[k] - grid.origin[k]) / grid.h[k];
      f = std::clamp(f, 0.0, static_cast<double>(grid.n[k] - 1));
      std::int64_t b = static_cast<std::int64_t>(std::floor(f));
      b = std::clamp<std::int64_t>(b, 0, grid.n[k] - 2);
      base[k] = b;
      t[k] = f - b;
    }
    const int corners = 1 << grid.ndim;
    for (int c = 0; c < corners; ++c) {
      double w = 1.0;
      std::array<std::int64_t, 3> idx = base;
      for (int k = 0; k < grid.ndim; ++k) {
        const int bit = (c >> k) & 1;
        w *= bit ? t[k] : (1.0 - t[k]);
        idx[k] += bit;
      }
      if (w == 0.0) continue;
      nodes_[r].push_back(grid.index(idx[0], idx[1], idx[2]));
      weights_[r].push_back(w);
    }
  }
}

}  // namespace seistomo
