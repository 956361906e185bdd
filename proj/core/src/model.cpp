#include "seistomo/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace seistomo {

SlownessSquaredModel::SlownessSquaredModel(RegularGrid g, Field v)
    : grid(std::move(g)), values(std::move(v)) {
  if (static_cast<std::int64_t>(values.size()) != grid.num_nodes())
    throw ValidationError("model: value count does not match grid");
  for (double x : values)
    if (!(x > 0.0)) throw ValidationError("model: slowness-squared values must be positive");
}

SlownessSquaredModel velocity_to_slowness_squared(const RegularGrid& grid, const Field& velocity) {
  Field m(velocity.size());
  for (std::size_t i = 0; i < velocity.size(); ++i) {
    if (!(velocity[i] > 0.0)) throw ValidationError("velocity must be positive");
    m[i] = 1.0 / (velocity[i] * velocity[i]);
  }
  return SlownessSquaredModel(grid, std::move(m));
}

Field slowness_squared_to_velocity(const SlownessSquaredModel& m) {
  Field c(m.values.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 1.0 / std::sqrt(m.values[i]);
  return c;
}

RegularGrid padded_grid(const RegularGrid& core, const PerSideWidths& pad) {
  for (int k = 0; k < 3; ++k)
    if (pad.lo[k] < 0 || pad.hi[k] < 0) throw ValidationError("pad widths must be nonnegative");
  std::array<std::int64_t, 3> n = core.n;
  std::array<double, 3> origin = core.origin;
  for (int k = 0; k < core.ndim; ++k) {
    n[k] += pad.lo[k] + pad.hi[k];
    origin[k] -= pad.lo[k] * core.h[k];
  }
  return RegularGrid(core.ndim, n, core.h, origin);
}

Field pad_extend(const RegularGrid& core, const PerSideWidths& pad, const Field& core_field) {
  const RegularGrid pg = padded_grid(core, pad);
  Field out(pg.num_nodes());
  for (std::int64_t k = 0; k < pg.n[2]; ++k)
    for (std::int64_t j = 0; j < pg.n[1]; ++j)
      for (std::int64_t i = 0; i < pg.n[0]; ++i) {
        const std::int64_t ci = std::clamp<std::int64_t>(i - pad.lo[0], 0, core.n[0] - 1);
        const std::int64_t cj = std::clamp<std::int64_t>(j - pad.lo[1], 0, core.n[1] - 1);
        const std::int64_t ck = std::clamp<std::int64_t>(k - pad.lo[2], 0, core.n[2] - 1);
        out[pg.index(i, j, k)] = core_field[core.index(ci, cj, ck)];
      }
  return out;
}

Field pad_adjoint(const RegularGrid& core, const PerSideWidths& pad, const Field& padded_field) {
  const RegularGrid pg = padded_grid(core, pad);
  if (static_cast<std::int64_t>(padded_field.size()) != pg.num_nodes())
    throw ValidationError("pad_adjoint: field size does not match padded grid");
  Field out(core.num_nodes(), 0.0);
  for (std::int64_t k = 0; k < pg.n[2]; ++k)
    for (std::int64_t j = 0; j < pg.n[1]; ++j)
      for (std::int64_t i = 0; i < pg.n[0]; ++i) {
        const std::int64_t ci = std::clamp<std::int64_t>(i - pad.lo[0], 0, core.n[0] - 1);
        const std::int64_t cj = std::clamp<std::int64_t>(j - pad.lo[1], 0, core.n[1] - 1);
        const std::int64_t ck = std::clamp<std::int64_t>(k - pad.lo[2], 0, core.n[2] - 1);
        out[core.index(ci, cj, ck)] += padded_field[pg.index(i, j, k)];
      }
  return out;
}

Field restrict_to_core(const RegularGrid& core, const PerSideWidths& pad, const Field& padded_field) {
  const RegularGrid pg = padded_grid(core, pad);
  if (static_cast<std::int64_t>(padded_field.size()) != pg.num_nodes())
    throw ValidationError("restrict_to_core: field size does not match padded grid");
  Field out(core.num_nodes());
  for (std::int64_t k = 0; k < core.n[2]; ++k)
    for (std::int64_t j = 0; j < core.n[1]; ++j)
      for (std::int64_t i = 0; i < core.n[0]; ++i)
        out[core.index(i, j, k)] =
            padded_field[pg.index(i + pad.lo[0], j + pad.lo[1], k + pad.lo[2])];
  return out;
}

PaddedModel pad_model(const SlownessSquaredModel& core, const PerSideWidths& pad) {
  PaddedModel pm;
  pm.core = core;
  pm.pad = pad;
  const RegularGrid pg = padded_grid(core.grid, pad);
  pm.padded = SlownessSquaredModel(pg, pad_extend(core.grid, pad, core.values));
  return pm;
}

PerSideWidths extend_pad_for_coarsening(const RegularGrid& core, PerSideWidths pad, int nlevels,
                                        std::array<int, 3>* added) {
  const std::int64_t div = std::int64_t{1} << (nlevels - 1);
  if (added) *added = {0, 0, 0};
  for (int k = 0; k < core.ndim; ++k) {
    std::int64_t n = core.n[k] + pad.lo[k] + pad.hi[k];
    int extra = 0;
    while ((n - 1) % div != 0) {
      ++n;
      ++extra;
    }
    pad.hi[k] += extra;
    if (added) (*added)[k] = extra;
  }
  return pad;
}

void write_model_file(const std::string& path, const SlownessSquaredModel& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  const RegularGrid& g = m.grid;
  char head[256];
  int len;
  if (g.ndim == 2)
    len = std::snprintf(head, sizeof head, "JSSM1 2 %lld %lld %.17g %.17g\n",
                        static_cast<long long>(g.n[0]), static_cast<long long>(g.n[1]), g.h[0],
                        g.h[1]);
  else
    len = std::snprintf(head, sizeof head, "JSSM1 3 %lld %lld %lld %.17g %.17g %.17g\n",
                        static_cast<long long>(g.n[0]), static_cast<long long>(g.n[1]),
                        static_cast<long long>(g.n[2]), g.h[0], g.h[1], g.h[2]);
  f.write(head, len);
  std::vector<float> buf(m.values.begin(), m.values.end());
  static_assert(std::endian::native == std::endian::little, "little-endian host assumed");
  f.write(reinterpret_cast<const char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!f) throw IoError("short write: " + path);
}

SlownessSquaredModel read_model_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  std::string header;
  if (!std::getline(f, header)) throw IoError("missing JSSM1 header: " + path);
  std::istringstream hs(header);
  std::string magic;
  int ndim = 0;
  hs >> magic >> ndim;
  if (magic != "JSSM1" || (ndim != 2 && ndim != 3))
    throw IoError("bad JSSM1 header: " + path);
  std::array<std::int64_t, 3> n{1, 1, 1};
  std::array<double, 3> h{1.0, 1.0, 1.0};
  for (int k = 0; k < ndim; ++k) hs >> n[k];
  for (int k = 0; k < ndim; ++k) hs >> h[k];
  if (!hs) throw IoError("truncated JSSM1 header: " + path);
  RegularGrid g(ndim, n, h);
  std::vector<float> buf(g.num_nodes());
  f.read(reinterpret_cast<char*>(buf.data()),
         static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (f.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
    throw IoError("truncated JSSM1 payload at byte " +
                  std::to_string(static_cast<long long>(f.gcount())) + ": " + path);
  Field v(buf.begin(), buf.end());
  return SlownessSquaredModel(g, std::move(v));
}

}  // namespace seistomo
