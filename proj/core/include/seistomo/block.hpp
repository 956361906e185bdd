#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "seistomo/dense.hpp"
#include "seistomo/parallel.hpp"

namespace seistomo {

/// A block of k same-length vectors stored node-major (a[i*k + j]), so
/// operator sweeps touch all columns of a node contiguously. This is the
/// layout behind the batched "level-3 style" products used by the block
/// Krylov methods and block multigrid cycles.
template <class S>
struct BlockVec {
  std::int64_t n = 0;
  int k = 0;
  std::vector<S> a;

  BlockVec() = default;
  BlockVec(std::int64_t n_, int k_) : n(n_), k(k_), a(static_cast<std::size_t>(n_) * k_, S{}) {}

  S& operator()(std::int64_t i, int j) { return a[i * k + j]; }
  const S& operator()(std::int64_t i, int j) const { return a[i * k + j]; }

  void set_zero() { std::fill(a.begin(), a.end(), S{}); }

  void set_col(int j, const std::vector<S>& v) {
    for (std::int64_t i = 0; i < n; ++i) a[i * k + j] = v[i];
  }
  std::vector<S> col(int j) const {
    std::vector<S> v(n);
    for (std::int64_t i = 0; i < n; ++i) v[i] = a[i * k + j];
    return v;
  }
};

/// Per-column Euclidean norms.
template <class S>
std::vector<double> col_norms(const BlockVec<S>& X) {
  std::vector<double> out(X.k, 0.0);
  std::vector<double> acc(X.k, 0.0);
  for (std::int64_t i = 0; i < X.n; ++i)
    for (int j = 0; j < X.k; ++j) acc[j] += detail::abs2(X(i, j));
  for (int j = 0; j < X.k; ++j) out[j] = std::sqrt(acc[j]);
  return out;
}

/// Batched Gram product X^H Y (conjugate = true) or X^T Y (false); the
/// k x k result is what the block methods feed their small dense solves.
template <class S>
DenseMat<S> gram(const BlockVec<S>& X, const BlockVec<S>& Y, bool conjugate = true) {
  DenseMat<S> G(X.k, Y.k);
  const int kx = X.k, ky = Y.k;
  const int nt = num_threads();
  const std::int64_t chunk = (X.n + nt - 1) / nt;
  std::vector<DenseMat<S>> partial(nt, DenseMat<S>(kx, ky));
  parallel_for(0, nt, [&](std::int64_t c0, std::int64_t c1) {
    for (std::int64_t c = c0; c < c1; ++c) {
      const std::int64_t lo = c * chunk, hi = std::min<std::int64_t>(X.n, lo + chunk);
      auto& P = partial[c];
      for (std::int64_t i = lo; i < hi; ++i)
        for (int p = 0; p < kx; ++p) {
          const S xv = conjugate ? detail::conj_if(X(i, p)) : X(i, p);
          if (xv == S{}) continue;
          for (int q = 0; q < ky; ++q) P(p, q) += xv * Y(i, q);
        }
    }
  }, 1);
  for (int t = 0; t < nt; ++t)
    for (std::int64_t e = 0; e < static_cast<std::int64_t>(G.a.size()); ++e) G.a[e] += partial[t].a[e];
  return G;
}

/// Y += X * C with C a small k_x x k_y coefficient matrix.
template <class S>
void add_block_scaled(BlockVec<S>& Y, const BlockVec<S>& X, const DenseMat<S>& C) {
  const int kx = X.k, ky = Y.k;
  parallel_for(0, X.n, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i)
      for (int p = 0; p < kx; ++p) {
        const S xv = X(i, p);
        if (xv == S{}) continue;
        for (int q = 0; q < ky; ++q) Y(i, q) += xv * C(p, q);
      }
  });
}

/// Y = Y*s + X*t elementwise (block axpby).
template <class S>
void axpby(BlockVec<S>& Y, S s, const BlockVec<S>& X, S t) {
  parallel_for(0, static_cast<std::int64_t>(Y.a.size()), [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t e = lo; e < hi; ++e) Y.a[e] = s * Y.a[e] + t * X.a[e];
  });
}

/// Thin QR of a block via modified Gram-Schmidt with one re-orthogonalization
/// pass per column. On return W holds Q and R is k x k upper triangular.
/// rank_deficient is set when a column collapses below tol relative to its
/// original norm (that column of Q is zeroed).
template <class S>
void thin_qr(BlockVec<S>& W, DenseMat<S>& R, bool* rank_deficient = nullptr,
             double tol = 1e-12) {
  const int k = W.k;
  R = DenseMat<S>(k, k);
  if (rank_deficient) *rank_deficient = false;
  for (int j = 0; j < k; ++j) {
    double norm0 = 0.0;
    for (std::int64_t i = 0; i < W.n; ++i) norm0 += detail::abs2(W(i, j));
    norm0 = std::sqrt(norm0);
    for (int pass = 0; pass < 2; ++pass) {
      for (int p = 0; p < j; ++p) {
        S dot{};
        for (std::int64_t i = 0; i < W.n; ++i) dot += detail::conj_if(W(i, p)) * W(i, j);
        if (dot == S{}) continue;
        for (std::int64_t i = 0; i < W.n; ++i) W(i, j) -= dot * W(i, p);
        R(p, j) += dot;
      }
      if (j == 0) break;
    }
    double norm = 0.0;
    for (std::int64_t i = 0; i < W.n; ++i) norm += detail::abs2(W(i, j));
    norm = std::sqrt(norm);
    if (norm <= tol * (norm0 > 0 ? norm0 : 1.0)) {
      if (rank_deficient) *rank_deficient = true;
      for (std::int64_t i = 0; i < W.n; ++i) W(i, j) = S{};
      R(j, j) = S{};
      continue;
    }
    R(j, j) = S{norm};
    const S inv = S{1.0 / norm};
    for (std::int64_t i = 0; i < W.n; ++i) W(i, j) *= inv;
  }
}

}  // namespace seistomo
