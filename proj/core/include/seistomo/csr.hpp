#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "seistomo/block.hpp"
#include "seistomo/dense.hpp"
#include "seistomo/errors.hpp"
#include "seistomo/parallel.hpp"

namespace seistomo {

/// Compressed sparse row matrix over double or complex<double>.
/// Column indices are sorted within each row.
template <class S>
struct Csr {
  std::int64_t rows = 0, cols = 0;
  std::vector<std::int64_t> rp;   // size rows+1
  std::vector<std::int32_t> ci;   // column indices
  std::vector<S> v;

  Csr() = default;
  Csr(std::int64_t r, std::int64_t c) : rows(r), cols(c), rp(r + 1, 0) {}

  std::int64_t nnz() const { return static_cast<std::int64_t>(ci.size()); }

  void mul(const std::vector<S>& x, std::vector<S>& y) const {
    y.assign(rows, S{});
    parallel_for(0, rows, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t r = lo; r < hi; ++r) {
        S acc{};
        for (std::int64_t e = rp[r]; e < rp[r + 1]; ++e) acc += v[e] * x[ci[e]];
        y[r] = acc;
      }
    });
  }

  /// y = A x for a node-major block; one row traversal updates all columns.
  void mul_block(const BlockVec<S>& x, BlockVec<S>& y) const {
    const int k = x.k;
    if (y.n != rows || y.k != k) y = BlockVec<S>(rows, k);
    parallel_for(0, rows, [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t r = lo; r < hi; ++r) {
        S* out = &y.a[r * k];
        for (int j = 0; j < k; ++j) out[j] = S{};
        for (std::int64_t e = rp[r]; e < rp[r + 1]; ++e) {
          const S a = v[e];
          const S* xin = &x.a[static_cast<std::int64_t>(ci[e]) * k];
          for (int j = 0; j < k; ++j) out[j] += a * xin[j];
        }
      }
    });
  }

  std::vector<S> diagonal() const {
    std::vector<S> d(rows, S{});
    for (std::int64_t r = 0; r < rows; ++r)
      for (std::int64_t e = rp[r]; e < rp[r + 1]; ++e)
        if (ci[e] == r) d[r] = v[e];
    return d;
  }

  DenseMat<S> to_dense() const {
    DenseMat<S> D(rows, cols);
    for (std::int64_t r = 0; r < rows; ++r)
      for (std::int64_t e = rp[r]; e < rp[r + 1]; ++e) D(r, ci[e]) += v[e];
    return D;
  }
};

/// Row-wise builder producing sorted, duplicate-merged CSR.
template <class S>
class CsrBuilder {
public:
  CsrBuilder(std::int64_t rows, std::int64_t cols) : rows_(rows), cols_(cols), entries_(rows) {}
  void add(std::int64_t r, std::int64_t c, S val) {
    entries_[r].emplace_back(static_cast<std::int32_t>(c), val);
  }
  Csr<S> build() {
    Csr<S> m(rows_, cols_);
    std::int64_t nnz = 0;
    for (auto& row : entries_) nnz += static_cast<std::int64_t>(row.size());
    m.ci.reserve(nnz);
    m.v.reserve(nnz);
    for (std::int64_t r = 0; r < rows_; ++r) {
      auto& row = entries_[r];
      std::sort(row.begin(), row.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t q = 0; q < row.size(); ++q) {
        const bool merge = static_cast<std::int64_t>(m.ci.size()) > m.rp[r] &&
                           m.ci.back() == row[q].first;
        if (merge)
          m.v.back() += row[q].second;
        else {
          m.ci.push_back(row[q].first);
          m.v.push_back(row[q].second);
        }
      }
      m.rp[r + 1] = static_cast<std::int64_t>(m.ci.size());
    }
    return m;
  }

private:
  std::int64_t rows_, cols_;
  std::vector<std::vector<std::pair<std::int32_t, S>>> entries_;
};

template <class S>
Csr<S> transpose(const Csr<S>& a) {
  Csr<S> t(a.cols, a.rows);
  std::vector<std::int64_t> count(a.cols, 0);
  for (std::int32_t c : a.ci) ++count[c];
  t.rp.assign(a.cols + 1, 0);
  for (std::int64_t c = 0; c < a.cols; ++c) t.rp[c + 1] = t.rp[c] + count[c];
  t.ci.resize(a.nnz());
  t.v.resize(a.nnz());
  std::vector<std::int64_t> cursor(t.rp.begin(), t.rp.end() - 1);
  for (std::int64_t r = 0; r < a.rows; ++r)
    for (std::int64_t e = a.rp[r]; e < a.rp[r + 1]; ++e) {
      const std::int64_t pos = cursor[a.ci[e]]++;
      t.ci[pos] = static_cast<std::int32_t>(r);
      t.v[pos] = a.v[e];
    }
  return t;  // rows visited in order, so columns are sorted
}

/// Sparse product C = A B (Gustavson row-merge).
template <class S>
Csr<S> matmul(const Csr<S>& a, const Csr<S>& b) {
  if (a.cols != b.rows) throw ValidationError("matmul: inner dimension mismatch");
  Csr<S> c(a.rows, b.cols);
  std::vector<std::int64_t> mark(b.cols, -1);
  std::vector<S> acc(b.cols, S{});
  std::vector<std::int32_t> idx;
  for (std::int64_t r = 0; r < a.rows; ++r) {
    idx.clear();
    for (std::int64_t ea = a.rp[r]; ea < a.rp[r + 1]; ++ea) {
      const S av = a.v[ea];
      const std::int64_t mid = a.ci[ea];
      for (std::int64_t eb = b.rp[mid]; eb < b.rp[mid + 1]; ++eb) {
        const std::int32_t col = b.ci[eb];
        if (mark[col] != r) {
          mark[col] = r;
          acc[col] = S{};
          idx.push_back(col);
        }
        acc[col] += av * b.v[eb];
      }
    }
    std::sort(idx.begin(), idx.end());
    for (std::int32_t col : idx) {
      c.ci.push_back(col);
      c.v.push_back(acc[col]);
    }
    c.rp[r + 1] = static_cast<std::int64_t>(c.ci.size());
  }
  return c;
}

template <class S>
Csr<S> add_shifted_identity(Csr<S> a, S shift) {
  CsrBuilder<S> b(a.rows, a.cols);
  for (std::int64_t r = 0; r < a.rows; ++r) {
    bool has_diag = false;
    for (std::int64_t e = a.rp[r]; e < a.rp[r + 1]; ++e) {
      S val = a.v[e];
      if (a.ci[e] == r) {
        val += shift;
        has_diag = true;
      }
      b.add(r, a.ci[e], val);
    }
    if (!has_diag) b.add(r, r, shift);
  }
  return b.build();
}

}  // namespace seistomo
