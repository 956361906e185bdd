#include "seistomo/dense.hpp"

#include <algorithm>

#include "seistomo/parallel.hpp"

namespace seistomo {

template <class S>
void BandedLU<S>::factor_inplace() {
  // gbtrf-style elimination: row pivoting within the kl subdiagonals,
  // fill confined to kl+ku superdiagonals.
  for (std::int64_t k = 0; k < n_; ++k) {
    const std::int64_t imax = std::min(n_ - 1, k + kl_);
    std::int64_t p = k;
    double best = detail::abs2(at(k, k));
    for (std::int64_t i = k + 1; i <= imax; ++i) {
      const double v = detail::abs2(at(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best > 0.0)) throw FactorizationError("banded LU: singular pivot at " + std::to_string(k));
    piv_[k] = p;
    const std::int64_t jmax = std::min(n_ - 1, k + kl_ + ku_);
    if (p != k)
      for (std::int64_t j = k; j <= jmax; ++j) std::swap(at(k, j), at(p, j));
    const S inv = S{1} / at(k, k);
    for (std::int64_t i = k + 1; i <= imax; ++i) {
      const S l = at(i, k) * inv;
      at(i, k) = l;
      if (l != S{})
        for (std::int64_t j = k + 1; j <= jmax; ++j) at(i, j) -= l * at(k, j);
    }
  }
}

template <class S>
void BandedLU<S>::solve(S* x, std::int64_t nrhs, std::int64_t stride) const {
  // Columns are independent; parallelize over right-hand sides.
  parallel_for(0, nrhs, [&](std::int64_t c0, std::int64_t c1) {
    for (std::int64_t c = c0; c < c1; ++c) {
      S* b = x;
      auto bc = [&](std::int64_t i) -> S& { return b[i * stride + c]; };
      for (std::int64_t k = 0; k < n_; ++k) {
        if (piv_[k] != k) std::swap(bc(k), bc(piv_[k]));
        const std::int64_t imax = std::min(n_ - 1, k + kl_);
        const S bk = bc(k);
        if (bk != S{})
          for (std::int64_t i = k + 1; i <= imax; ++i) bc(i) -= at(i, k) * bk;
      }
      for (std::int64_t k = n_ - 1; k >= 0; --k) {
        const std::int64_t jmax = std::min(n_ - 1, k + kl_ + ku_);
        S v = bc(k);
        for (std::int64_t j = k + 1; j <= jmax; ++j) v -= at(k, j) * bc(j);
        bc(k) = v / at(k, k);
      }
    }
  }, 1);
}

template class BandedLU<double>;
template class BandedLU<std::complex<double>>;

}  // namespace seistomo
