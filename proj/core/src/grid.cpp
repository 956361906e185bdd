#include "seistomo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace seistomo {

RegularGrid::RegularGrid(int ndim_, std::array<std::int64_t, 3> n_, std::array<double, 3> h_,
                         std::array<double, 3> origin_)
    : ndim(ndim_), n(n_), h(h_), origin(origin_) {
  if (ndim != 2 && ndim != 3) throw ValidationError("grid: ndim must be 2 or 3");
  if (ndim == 2) {
    n[2] = 1;
    h[2] = 1.0;
    origin[2] = 0.0;
  }
  for (int k = 0; k < ndim; ++k) {
    if (n[k] < 3)
      throw ValidationError("grid: axis " + std::to_string(k) + " needs at least 3 nodes");
    if (!(h[k] > 0.0))
      throw ValidationError("grid: spacing on axis " + std::to_string(k) + " must be positive");
  }
  // total node count must fit the signed 64-bit index type
  const std::int64_t cap = std::numeric_limits<std::int64_t>::max();
  if (n[0] != 0 && cap / n[0] / n[1] < n[2]) throw ValidationError("grid: node count overflows index type");
}

double RegularGrid::min_h() const {
  double m = h[0];
  for (int k = 1; k < ndim; ++k) m = std::min(m, h[k]);
  return m;
}

bool RegularGrid::contains(const std::array<double, 3>& x) const {
  const double eps = 1e-9;
  for (int k = 0; k < ndim; ++k) {
    const double lo = origin[k] - eps * h[k];
    const double hi = origin[k] + (n[k] - 1) * h[k] + eps * h[k];
    if (x[k] < lo || x[k] > hi) return false;
  }
  return true;
}

std::int64_t RegularGrid::nearest_node(const std::array<double, 3>& x) const {
  std::array<std::int64_t, 3> c{0, 0, 0};
  for (int k = 0; k < ndim; ++k) {
    const double f = (x[k] - origin[k]) / h[k];
    std::int64_t i = static_cast<std::int64_t>(std::floor(f + 0.5));
    if (static_cast<double>(i) - f == 0.5) --i;  // tie toward the lower index
    c[k] = std::clamp<std::int64_t>(i, 0, n[k] - 1);
  }
  return index(c[0], c[1], c[2]);
}

}  // namespace seistomo
