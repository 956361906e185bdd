#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "seistomo/errors.hpp"

namespace seistomo {

namespace detail {
template <class S>
double abs2(S x) {
  if constexpr (std::is_same_v<S, std::complex<double>>)
    return x.real() * x.real() + x.imag() * x.imag();
  else
    return static_cast<double>(x) * static_cast<double>(x);
}
template <class S>
S conj_if(S x) {
  if constexpr (std::is_same_v<S, std::complex<double>>)
    return std::conj(x);
  else
    return x;
}
}  // namespace detail

/// Small row-major dense matrix for block coefficients and Hessenberg
/// systems. Not meant for grid-sized data.
template <class S>
struct DenseMat {
  std::int64_t rows = 0, cols = 0;
  std::vector<S> a;

  DenseMat() = default;
  DenseMat(std::int64_t r, std::int64_t c) : rows(r), cols(c), a(r * c, S{}) {}
  S& operator()(std::int64_t r, std::int64_t c) { return a[r * cols + c]; }
  const S& operator()(std::int64_t r, std::int64_t c) const { return a[r * cols + c]; }

  static DenseMat identity(std::int64_t n) {
    DenseMat m(n, n);
    for (std::int64_t i = 0; i < n; ++i) m(i, i) = S{1};
    return m;
  }
};

/// In-place LU with partial pivoting. Throws FactorizationError on a
/// numerically singular pivot.
template <class S>
void lu_factor(DenseMat<S>& A, std::vector<std::int64_t>& piv) {
  const std::int64_t n = A.rows;
  if (A.cols != n) throw ValidationError("lu_factor: square matrix required");
  piv.resize(n);
  double scale = 0.0;
  for (const S& x : A.a) scale = std::max(scale, std::sqrt(detail::abs2(x)));
  if (scale == 0.0) throw FactorizationError("lu_factor: zero matrix");
  for (std::int64_t k = 0; k < n; ++k) {
    std::int64_t p = k;
    double best = detail::abs2(A(k, k));
    for (std::int64_t i = k + 1; i < n; ++i) {
      const double v = detail::abs2(A(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (std::sqrt(best) < 1e-14 * scale)
      throw FactorizationError("lu_factor: singular pivot at column " + std::to_string(k));
    piv[k] = p;
    if (p != k)
      for (std::int64_t c = 0; c < n; ++c) std::swap(A(k, c), A(p, c));
    const S inv = S{1} / A(k, k);
    for (std::int64_t i = k + 1; i < n; ++i) {
      const S l = A(i, k) * inv;
      A(i, k) = l;
      for (std::int64_t c = k + 1; c < n; ++c) A(i, c) -= l * A(k, c);
    }
  }
}

/// Solve with factors from lu_factor; B is overwritten with the solution
/// (multiple right-hand sides as columns).
template <class S>
void lu_solve(const DenseMat<S>& LU, const std::vector<std::int64_t>& piv, DenseMat<S>& B) {
  const std::int64_t n = LU.rows;
  if (B.rows != n) throw ValidationError("lu_solve: dimension mismatch");
  for (std::int64_t k = 0; k < n; ++k)
    if (piv[k] != k)
      for (std::int64_t c = 0; c < B.cols; ++c) std::swap(B(k, c), B(piv[k], c));
  for (std::int64_t k = 0; k < n; ++k)
    for (std::int64_t i = k + 1; i < n; ++i) {
      const S l = LU(i, k);
      if (l != S{})
        for (std::int64_t c = 0; c < B.cols; ++c) B(i, c) -= l * B(k, c);
    }
  for (std::int64_t k = n - 1; k >= 0; --k) {
    const S inv = S{1} / LU(k, k);
    for (std::int64_t c = 0; c < B.cols; ++c) {
      S x = B(k, c);
      for (std::int64_t j = k + 1; j < n; ++j) x -= LU(k, j) * B(j, c);
      B(k, c) = x * inv;
    }
  }
}

template <class S>
DenseMat<S> solve_small(DenseMat<S> A, DenseMat<S> B) {
  std::vector<std::int64_t> piv;
  lu_factor(A, piv);
  lu_solve(A, piv, B);
  return B;
}

/// Householder least squares: minimizes ||A Y - B||_F columnwise for a
/// tall matrix A (rows >= cols). Returns Y (cols x nrhs); if res_norms is
/// given it receives the per-column residual norms. A and B are consumed.
template <class S>
DenseMat<S> least_squares(DenseMat<S> A, DenseMat<S> B, std::vector<double>* res_norms = nullptr) {
  const std::int64_t m = A.rows, n = A.cols, k = B.cols;
  if (B.rows != m || m < n) throw ValidationError("least_squares: bad shapes");
  for (std::int64_t j = 0; j < n; ++j) {
    double norm2 = 0.0;
    for (std::int64_t i = j; i < m; ++i) norm2 += detail::abs2(A(i, j));
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) {
      A(j, j) = S{};  // breakdown column: back substitution assigns a zero coefficient
      continue;
    }
    // Householder vector v = x + sign(x0)*||x|| e1, stored in A(j..m-1, j)
    S x0 = A(j, j);
    const double ax0 = std::sqrt(detail::abs2(x0));
    const S phase = ax0 > 0 ? x0 / S{ax0} : S{1};
    const S alpha = phase * S{norm};
    A(j, j) = x0 + alpha;
    double v2 = 0.0;
    for (std::int64_t i = j; i < m; ++i) v2 += detail::abs2(A(i, j));
    if (v2 == 0.0) throw FactorizationError("least_squares: degenerate reflector");
    const double beta = 2.0 / v2;
    // apply (I - beta v v^H) to trailing columns of A and to B
    for (std::int64_t c = j + 1; c < n; ++c) {
      S dot{};
      for (std::int64_t i = j; i < m; ++i) dot += detail::conj_if(A(i, j)) * A(i, c);
      dot *= S{beta};
      for (std::int64_t i = j; i < m; ++i) A(i, c) -= dot * A(i, j);
    }
    for (std::int64_t c = 0; c < k; ++c) {
      S dot{};
      for (std::int64_t i = j; i < m; ++i) dot += detail::conj_if(A(i, j)) * B(i, c);
      dot *= S{beta};
      for (std::int64_t i = j; i < m; ++i) B(i, c) -= dot * A(i, j);
    }
    A(j, j) = -alpha;  // R diagonal
  }
  DenseMat<S> Y(n, k);
  for (std::int64_t c = 0; c < k; ++c)
    for (std::int64_t r = n - 1; r >= 0; --r) {
      if (A(r, r) == S{}) {
        Y(r, c) = S{};
        continue;
      }
      S x = B(r, c);
      for (std::int64_t j2 = r + 1; j2 < n; ++j2) x -= A(r, j2) * Y(j2, c);
      Y(r, c) = x / A(r, r);
    }
  if (res_norms) {
    res_norms->assign(k, 0.0);
    for (std::int64_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::int64_t i = n; i < m; ++i) s += detail::abs2(B(i, c));
      (*res_norms)[c] = std::sqrt(s);
    }
  }
  return Y;
}

/// Banded LU with partial pivoting (LAPACK gbtrf-style storage). Used for
/// the coarsest multigrid operator and small regularizer solves.
template <class S>
class BandedLU {
public:
  BandedLU() = default;

  /// Factor a banded matrix given by entry callback over its profile:
  /// entries(i) must yield pairs (j, a_ij) with |i-j| <= band.
  template <class EntryFn>
  void factor(std::int64_t n, std::int64_t band, const EntryFn& row_entries) {
    n_ = n;
    kl_ = ku_ = band;
    ld_ = 2 * kl_ + ku_ + 1;
    ab_.assign(ld_ * n_, S{});
    piv_.assign(n_, 0);
    for (std::int64_t i = 0; i < n_; ++i)
      row_entries(i, [&](std::int64_t j, S v) {
        if (j < 0 || j >= n_ || std::llabs(static_cast<long long>(i - j)) > band)
          throw ValidationError("banded factor: entry outside band");
        at(i, j) += v;
      });
    factor_inplace();
  }

  void solve(S* x, std::int64_t nrhs, std::int64_t stride) const;  // x: solution in place of rhs
  void solve_vec(std::vector<S>& b) const { solve(b.data(), 1, 1); }

  std::int64_t size() const { return n_; }
  std::int64_t bytes() const { return static_cast<std::int64_t>(ab_.size() * sizeof(S)); }

private:
  S& at(std::int64_t i, std::int64_t j) { return ab_[(kl_ + ku_ + i - j) + j * ld_]; }
  const S& at(std::int64_t i, std::int64_t j) const { return ab_[(kl_ + ku_ + i - j) + j * ld_]; }
  void factor_inplace();

  std::int64_t n_ = 0, kl_ = 0, ku_ = 0, ld_ = 0;
  std::vector<S> ab_;
  std::vector<std::int64_t> piv_;
};

extern template class BandedLU<double>;
extern template class BandedLU<std::complex<double>>;

}  // namespace seistomo
