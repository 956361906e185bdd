#include "seistomo/helmholtz.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "seistomo/half.hpp"
#include "seistomo/parallel.hpp"

namespace seistomo {

HelmholtzProblem::HelmholtzProblem(SlownessSquaredModel m_padded, double omega,
                                   AttenuationField gamma, bool allow_coarse_ppw)
    : m_(std::move(m_padded)), omega_(omega), gamma_(std::move(gamma)) {
  if (!(omega_ > 0.0)) throw ValidationError("helmholtz: omega must be positive");
  if (gamma_.grid.n != m_.grid.n) throw ValidationError("helmholtz: attenuation grid mismatch");
  const double ppw = points_per_wavelength();
  if (ppw < 10.0 - 1e-12 && !allow_coarse_ppw)
    throw ValidationError("helmholtz: " + std::to_string(ppw) +
                          " grid points per wavelength (need >= 10); pass allow_coarse to override");
  const RegularGrid& g = m_.grid;
  center_lap_ = 0.0;
  for (int k = 0; k < 3; ++k) {
    inv_h2_[k] = (g.n[k] > 1) ? 1.0 / (g.h[k] * g.h[k]) : 0.0;
    center_lap_ -= 2.0 * inv_h2_[k];
  }
  const Field gam = gamma_.gamma_at(omega_);
  mass_.resize(g.num_nodes());
  gamma_factor_.resize(g.num_nodes());
  for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
    gamma_factor_[i] = cplx(1.0, -gam[i] / omega_);
    mass_[i] = omega_ * omega_ * gamma_factor_[i] * m_.values[i];
  }
}

double HelmholtzProblem::points_per_wavelength() const {
  const double smax = std::sqrt(*std::max_element(m_.values.begin(), m_.values.end()));
  return 2.0 * M_PI / (omega_ * smax * m_.grid.min_h());
}

void HelmholtzProblem::apply(const CField& u, CField& out) const {
  const RegularGrid& g = m_.grid;
  if (static_cast<std::int64_t>(u.size()) != g.num_nodes())
    throw ValidationError("helmholtz apply: field size mismatch");
  out.resize(u.size());
  const std::int64_t n0 = g.n[0], n1 = g.n[1], n2 = g.n[2];
  const std::int64_t s1 = n0, s2 = n0 * n1;
  parallel_for(0, n2 * n1, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t jk = lo; jk < hi; ++jk) {
      const std::int64_t k = jk / n1, j = jk % n1;
      const std::int64_t row0 = jk * n0;
      for (std::int64_t i = 0; i < n0; ++i) {
        const std::int64_t idx = row0 + i;
        cplx acc = (center_lap_ + mass_[idx]) * u[idx];
        if (i > 0) acc += inv_h2_[0] * u[idx - 1];
        if (i + 1 < n0) acc += inv_h2_[0] * u[idx + 1];
        if (j > 0) acc += inv_h2_[1] * u[idx - s1];
        if (j + 1 < n1) acc += inv_h2_[1] * u[idx + s1];
        if (k > 0) acc += inv_h2_[2] * u[idx - s2];
        if (k + 1 < n2) acc += inv_h2_[2] * u[idx + s2];
        out[idx] = acc;
      }
    }
  }, 1024);
}

void HelmholtzProblem::apply_block(const BlockVec<cplx>& u, BlockVec<cplx>& out) const {
  const RegularGrid& g = m_.grid;
  if (u.n != g.num_nodes()) throw ValidationError("helmholtz apply: block size mismatch");
  if (out.n != u.n || out.k != u.k) out = BlockVec<cplx>(u.n, u.k);
  const std::int64_t n0 = g.n[0], n1 = g.n[1], n2 = g.n[2];
  const std::int64_t s1 = n0, s2 = n0 * n1;
  const int kb = u.k;
  parallel_for(0, n2 * n1, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t jk = lo; jk < hi; ++jk) {
      const std::int64_t k = jk / n1, j = jk % n1;
      for (std::int64_t i = 0; i < n0; ++i) {
        const std::int64_t idx = jk * n0 + i;
        cplx* o = &out.a[idx * kb];
        const cplx c = center_lap_ + mass_[idx];
        const cplx* uc = &u.a[idx * kb];
        for (int q = 0; q < kb; ++q) o[q] = c * uc[q];
        auto addn = [&](std::int64_t nidx, double w) {
          const cplx* un = &u.a[nidx * kb];
          for (int q = 0; q < kb; ++q) o[q] += w * un[q];
        };
        if (i > 0) addn(idx - 1, inv_h2_[0]);
        if (i + 1 < n0) addn(idx + 1, inv_h2_[0]);
        if (j > 0) addn(idx - s1, inv_h2_[1]);
        if (j + 1 < n1) addn(idx + s1, inv_h2_[1]);
        if (k > 0) addn(idx - s2, inv_h2_[2]);
        if (k + 1 < n2) addn(idx + s2, inv_h2_[2]);
      }
    }
  }, 512);
}

Csr<cplx> HelmholtzProblem::to_csr(double shift_factor) const {
  const RegularGrid& g = m_.grid;
  const std::int64_t n = g.num_nodes();
  CsrBuilder<cplx> b(n, n);
  const std::int64_t n0 = g.n[0], n1 = g.n[1], n2 = g.n[2];
  const std::int64_t s1 = n0, s2 = n0 * n1;
  const cplx shift_term(0.0, -shift_factor * omega_ * omega_);
  for (std::int64_t k = 0; k < n2; ++k)
    for (std::int64_t j = 0; j < n1; ++j)
      for (std::int64_t i = 0; i < n0; ++i) {
        const std::int64_t idx = g.index(i, j, k);
        b.add(idx, idx, center_lap_ + mass_[idx] + shift_term * m_.values[idx]);
        if (i > 0) b.add(idx, idx - 1, inv_h2_[0]);
        if (i + 1 < n0) b.add(idx, idx + 1, inv_h2_[0]);
        if (j > 0) b.add(idx, idx - s1, inv_h2_[1]);
        if (j + 1 < n1) b.add(idx, idx + s1, inv_h2_[1]);
        if (k > 0) b.add(idx, idx - s2, inv_h2_[2]);
        if (k + 1 < n2) b.add(idx, idx + s2, inv_h2_[2]);
      }
  return b.build();
}

CField HelmholtzProblem::point_source(const std::array<double, 3>& x_s, cplx amplitude) const {
  const RegularGrid& g = m_.grid;
  if (!g.contains(x_s)) throw ValidationError("point_source: position outside grid");
  double cell = 1.0;
  for (int k = 0; k < g.ndim; ++k) cell *= g.h[k];
  CField q(g.num_nodes(), cplx{});
  q[g.nearest_node(x_s)] = amplitude / cell;
  return q;
}

void WavefieldBatch::append(int source_id, const CField& u) {
  if (static_cast<std::int64_t>(u.size()) != grid_.num_nodes())
    throw ValidationError("wavefield batch: field size mismatch");
  source_ids_.push_back(source_id);
  if (precision_ == StoragePrecision::Full32) {
    full_.push_back(u);
    return;
  }
  Compact c;
  double peak = 0.0;
  for (const cplx& z : u) peak = std::max({peak, std::abs(z.real()), std::abs(z.imag())});
  c.scale = peak > 0.0 ? std::exp2(std::ceil(std::log2(peak))) : 1.0;
  c.re_im.resize(2 * u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    c.re_im[2 * i] = float_to_half(static_cast<float>(u[i].real() / c.scale));
    c.re_im[2 * i + 1] = float_to_half(static_cast<float>(u[i].imag() / c.scale));
  }
  compact_.push_back(std::move(c));
}

CField WavefieldBatch::field(std::size_t idx) const {
  if (idx >= source_ids_.size()) throw StateError("wavefield batch: no stored field at index");
  if (precision_ == StoragePrecision::Full32) return full_[idx];
  const Compact& c = compact_[idx];
  CField u(c.re_im.size() / 2);
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = cplx(half_to_float(c.re_im[2 * i]) * c.scale, half_to_float(c.re_im[2 * i + 1]) * c.scale);
  return u;
}

void WavefieldBatch::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  const char* tok = precision_ == StoragePrecision::Full32 ? "f32" : "f16";
  char head[128];
  const int len = std::snprintf(head, sizeof head, "JSWF1 %zu %lld %s\n", size(),
                                static_cast<long long>(grid_.num_nodes()), tok);
  f.write(head, len);
  static_assert(std::endian::native == std::endian::little);
  for (std::size_t s = 0; s < size(); ++s) {
    const CField u = field(s);
    if (precision_ == StoragePrecision::Full32) {
      std::vector<float> buf(2 * u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        buf[2 * i] = static_cast<float>(u[i].real());
        buf[2 * i + 1] = static_cast<float>(u[i].imag());
      }
      f.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    } else {
      std::vector<std::uint16_t> buf(2 * u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        buf[2 * i] = float_to_half(static_cast<float>(u[i].real()));
        buf[2 * i + 1] = float_to_half(static_cast<float>(u[i].imag()));
      }
      f.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(std::uint16_t)));
    }
  }
  if (!f) throw IoError("short write: " + path);
}

WavefieldBatch WavefieldBatch::load(const std::string& path, RegularGrid grid) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  std::string header;
  std::getline(f, header);
  std::istringstream hs(header);
  std::string magic, tok;
  std::size_t nsrc = 0;
  long long nnodes = 0;
  hs >> magic >> nsrc >> nnodes >> tok;
  if (magic != "JSWF1" || !hs) throw IoError("bad JSWF1 header: " + path);
  if (nnodes != grid.num_nodes()) throw IoError("JSWF1 node count does not match grid: " + path);
  const bool f16 = tok == "f16";
  if (!f16 && tok != "f32") throw IoError("bad JSWF1 precision token: " + path);
  WavefieldBatch batch(std::move(grid), StoragePrecision::Full32);
  CField u(nnodes);
  for (std::size_t s = 0; s < nsrc; ++s) {
    if (f16) {
      std::vector<std::uint16_t> buf(2 * nnodes);
      f.read(reinterpret_cast<char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(std::uint16_t)));
      if (!f) throw IoError("truncated JSWF1 payload: " + path);
      for (long long i = 0; i < nnodes; ++i)
        u[i] = cplx(half_to_float(buf[2 * i]), half_to_float(buf[2 * i + 1]));
    } else {
      std::vector<float> buf(2 * nnodes);
      f.read(reinterpret_cast<char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(float)));
      if (!f) throw IoError("truncated JSWF1 payload: " + path);
      for (long long i = 0; i < nnodes; ++i) u[i] = cplx(buf[2 * i], buf[2 * i + 1]);
    }
    batch.append(static_cast<int>(s), u);
  }
  return batch;
}

}  // namespace seistomo
