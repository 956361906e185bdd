#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "seistomo/errors.hpp"

namespace seistomo {

using Field = std::vector<double>;
using CField = std::vector<std::complex<double>>;
using cplx = std::complex<double>;

/// Per-axis (low side, high side) node counts; used for model padding and
/// absorbing-layer widths.
struct PerSideWidths {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};
};

/// Node-centered rectangular mesh. The first axis is fastest in memory;
/// 2D grids are stored with n[2] == 1. The last in-use axis is depth
/// (free surface at its low side).
struct RegularGrid {
  int ndim = 2;
  std::array<std::int64_t, 3> n{1, 1, 1};
  std::array<double, 3> h{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  RegularGrid() = default;
  RegularGrid(int ndim_, std::array<std::int64_t, 3> n_, std::array<double, 3> h_,
              std::array<double, 3> origin_ = {0.0, 0.0, 0.0});

  std::int64_t num_nodes() const { return n[0] * n[1] * n[2]; }

  std::int64_t index(std::int64_t i, std::int64_t j, std::int64_t k = 0) const {
    return i + n[0] * (j + n[1] * k);
  }
  std::array<std::int64_t, 3> unpack(std::int64_t idx) const {
    std::array<std::int64_t, 3> c;
    c[0] = idx % n[0];
    c[1] = (idx / n[0]) % n[1];
    c[2] = idx / (n[0] * n[1]);
    return c;
  }
  std::array<double, 3> position(std::int64_t idx) const {
    auto c = unpack(idx);
    return {origin[0] + c[0] * h[0], origin[1] + c[1] * h[1], origin[2] + c[2] * h[2]};
  }
  double min_h() const;
  /// Physical bounding box check (inclusive).
  bool contains(const std::array<double, 3>& x) const;
  /// Nearest node to a physical point; exact half-spacing ties break toward
  /// the lower index.
  std::int64_t nearest_node(const std::array<double, 3>& x) const;

  bool operator==(const RegularGrid&) const = default;
};

}  // namespace seistomo
