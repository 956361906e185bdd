#include "seistomo/regularizer.hpp"

#include <cmath>

namespace seistomo {

namespace {

/// Discrete Laplacian with mirrored boundary neighbors (u[-1] := u[1]).
Csr<double> build_laplacian(const RegularGrid& g) {
  const std::int64_t n = g.num_nodes();
  CsrBuilder<double> b(n, n);
  const std::array<std::int64_t, 3> stride{1, g.n[0], g.n[0] * g.n[1]};
  for (std::int64_t idx = 0; idx < n; ++idx) {
    const auto c = g.unpack(idx);
    for (int a = 0; a < g.ndim; ++a) {
      if (g.n[a] <= 1) continue;
      const double w = 1.0 / (g.h[a] * g.h[a]);
      b.add(idx, idx, -2.0 * w);
      const std::int64_t lo = c[a] > 0 ? idx - stride[a] : idx + stride[a];
      const std::int64_t hi = c[a] + 1 < g.n[a] ? idx + stride[a] : idx - stride[a];
      b.add(idx, lo, w);
      b.add(idx, hi, w);
    }
  }
  return b.build();
}

/// Forward-difference gradient stacked over axes (edge values).
Csr<double> build_gradient(const RegularGrid& g) {
  std::int64_t rows = 0;
  for (int a = 0; a < g.ndim; ++a)
    if (g.n[a] > 1) rows += g.num_nodes() / g.n[a] * (g.n[a] - 1);
  CsrBuilder<double> b(rows, g.num_nodes());
  const std::array<std::int64_t, 3> stride{1, g.n[0], g.n[0] * g.n[1]};
  std::int64_t row = 0;
  for (int a = 0; a < g.ndim; ++a) {
    if (g.n[a] <= 1) continue;
    const double w = 1.0 / g.h[a];
    for (std::int64_t idx = 0; idx < g.num_nodes(); ++idx) {
      const auto c = g.unpack(idx);
      if (c[a] + 1 >= g.n[a]) continue;
      b.add(row, idx, -w);
      b.add(row, idx + stride[a], w);
      ++row;
    }
  }
  return b.build();
}

}  // namespace

Regularizer::Regularizer(RegKind kind, RegularGrid grid, Field m_ref)
    : kind_(kind), grid_(std::move(grid)), m_ref_(std::move(m_ref)) {
  if (static_cast<std::int64_t>(m_ref_.size()) != grid_.num_nodes())
    throw ValidationError("regularizer: reference model does not match grid");
  L_ = kind_ == RegKind::R1Biharmonic ? build_laplacian(grid_) : build_gradient(grid_);
  Csr<double> Lt = transpose(L_);
  H_ = matmul(Lt, L_);
  for (auto& x : H_.v) x *= 2.0;
}

double Regularizer::value(const Field& m) const {
  Field d(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) d[i] = m[i] - m_ref_[i];
  Field Ld;
  L_.mul(d, Ld);
  double s = 0.0;
  for (double x : Ld) s += x * x;
  return s;
}

double Regularizer::value_and_gradient(const Field& m, Field& grad) const {
  Field d(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) d[i] = m[i] - m_ref_[i];
  H_.mul(d, grad);  // gradient = 2 L^T L d
  Field Ld;
  L_.mul(d, Ld);
  double s = 0.0;
  for (double x : Ld) s += x * x;
  return s;
}

void Regularizer::hessian_vec(const Field& v, Field& out) const { H_.mul(v, out); }

RegPreconditioner::RegPreconditioner(const Regularizer& reg, std::int64_t direct_threshold) {
  const Csr<double>& H = reg.hessian();
  double diag_mean = 0.0;
  for (double d : H.diagonal()) diag_mean += d;
  diag_mean /= static_cast<double>(H.rows);
  const double eps = 1e-8 * diag_mean;
  Csr<double> Hs = add_shifted_identity(H, eps);
  const RegularGrid& g = reg.grid();
  bool mg_ok = H.rows > direct_threshold;
  if (mg_ok) {
    try {
      coarsen_dims({g.n[0], g.n[1], g.n[2]});
    } catch (const ValidationError&) {
      mg_ok = false;  // dims not coarsenable: fall back to the direct solve
    }
  }
  if (!mg_ok) {
    std::int64_t band = 0;
    for (std::int64_t r = 0; r < Hs.rows; ++r)
      for (std::int64_t e = Hs.rp[r]; e < Hs.rp[r + 1]; ++e)
        band = std::max<std::int64_t>(band, std::llabs(static_cast<long long>(Hs.ci[e] - r)));
    direct_ = std::make_shared<BandedLU<double>>();
    direct_->factor(Hs.rows, band, [&](std::int64_t r, auto&& put) {
      for (std::int64_t e = Hs.rp[r]; e < Hs.rp[r + 1]; ++e) put(Hs.ci[e], Hs.v[e]);
    });
    return;
  }
  // Symmetric V(2,2) cycle; the biharmonic operator needs a smaller Jacobi
  // weight than the wave-equation cycles to keep the smoother contractive.
  spec_.kind = CycleKind::V;
  spec_.pre = spec_.post = 2;
  spec_.jacobi_weight = reg.kind() == RegKind::R1Biharmonic ? 0.4 : 0.6;
  int nlevels = 2;
  try {
    auto d = coarsen_dims({g.n[0], g.n[1], g.n[2]});
    while (nlevels < 4) {
      d = coarsen_dims(d);
      ++nlevels;
    }
  } catch (const ValidationError&) {
  }
  mg_ = std::make_shared<MgHierarchy<double>>(
      MgHierarchy<double>::build(std::move(Hs), {g.n[0], g.n[1], g.n[2]}, nlevels));
}

void RegPreconditioner::apply(const Field& r, Field& z) const {
  if (direct_) {
    z = r;
    direct_->solve_vec(z);
    return;
  }
  BlockVec<double> b(static_cast<std::int64_t>(r.size()), 1);
  b.set_col(0, r);
  BlockVec<double> x(b.n, 1);
  mg_->cycle(spec_, b, x);
  z = x.col(0);
}

}  // namespace seistomo
