#include "seistomo/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "seistomo/errors.hpp"

namespace seistomo {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> rhs_norms(const BlockVec<cplx>& B) {
  auto nb = col_norms(B);
  for (double& x : nb)
    if (x == 0.0) x = 1.0;  // zero rhs: treat tolerance as absolute
  return nb;
}

void record_convergence(SolveReport& rep, const std::vector<double>& res,
                        const std::vector<double>& bnorm, double tol, int cycle) {
  double worst = 0.0;
  for (std::size_t j = 0; j < res.size(); ++j) {
    const double rel = res[j] / bnorm[j];
    worst = std::max(worst, rel);
    if (rep.col_cycles[j] < 0 && rel <= tol) rep.col_cycles[j] = cycle;
  }
  rep.history.push_back(worst);
}

void finalize(const BlockOperator& op, const BlockVec<cplx>& B, const BlockVec<cplx>& X,
              const std::vector<double>& bnorm, double tol, SolveReport& rep) {
  BlockVec<cplx> R(B.n, B.k);
  op.apply(X, R);
  axpby(R, cplx{-1.0}, B, cplx{1.0});  // R = B - A X
  const auto rn = col_norms(R);
  rep.rel_residual.resize(B.k);
  rep.converged.resize(B.k);
  for (int j = 0; j < B.k; ++j) {
    rep.rel_residual[j] = rn[j] / bnorm[j];
    rep.converged[j] = rep.rel_residual[j] <= tol ? 1 : 0;
    if (rep.col_cycles[j] < 0) rep.col_cycles[j] = rep.cycles;
  }
}

void apply_prec(const BlockOperator& op, const BlockVec<cplx>& in, BlockVec<cplx>& out,
                SolveReport& rep) {
  if (op.prec) {
    op.prec(in, out);
    ++rep.cycles;
  } else {
    out = in;
  }
}

}  // namespace

std::pair<BlockVec<cplx>, SolveReport> block_bicgstab(const BlockOperator& op,
                                                      const BlockVec<cplx>& B, double tol,
                                                      int max_cycles) {
  const auto t0 = Clock::now();
  const std::int64_t n = B.n;
  const int k = B.k;
  SolveReport rep;
  rep.col_cycles.assign(k, -1);
  const auto bnorm = rhs_norms(B);

  BlockVec<cplx> X(n, k);
  BlockVec<cplx> R = B;  // X0 = 0
  {
    const auto r0 = col_norms(R);
    bool trivial = true;
    for (int j = 0; j < k; ++j) trivial = trivial && r0[j] / bnorm[j] <= tol;
    if (trivial) {
      finalize(op, B, X, bnorm, tol, rep);
      rep.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
      return {std::move(X), std::move(rep)};
    }
  }
  BlockVec<cplx> Rt = R;
  BlockVec<cplx> P = R;
  BlockVec<cplx> ZP(n, k), V(n, k), S(n, k), ZS(n, k), T(n, k);
  int restarts = 0;

  auto try_restart = [&](int iter) {
    if (++restarts > 2)
      throw BreakdownError("block BiCGSTAB: singular block recurrence", iter);
    op.apply(X, R);
    axpby(R, cplx{-1.0}, B, cplx{1.0});
    Rt = R;
    P = R;
  };

  while (rep.cycles < max_cycles) {
    apply_prec(op, P, ZP, rep);
    op.apply(ZP, V);
    DenseMat<cplx> RtV = gram(Rt, V);
    DenseMat<cplx> RtR = gram(Rt, R);
    rep.block_gram_products += 2;
    DenseMat<cplx> alpha;
    try {
      alpha = solve_small(RtV, RtR);
    } catch (const FactorizationError&) {
      try_restart(rep.cycles);
      continue;
    }
    S = R;
    {
      DenseMat<cplx> neg = alpha;
      for (auto& x : neg.a) x = -x;
      add_block_scaled(S, V, neg);
    }
    record_convergence(rep, col_norms(S), bnorm, tol, rep.cycles);
    if (rep.history.back() <= tol) {
      add_block_scaled(X, ZP, alpha);
      finalize(op, B, X, bnorm, tol, rep);
      if (rep.all_converged()) break;
      // true residual not there yet: keep iterating from the updated X
      op.apply(X, R);
      axpby(R, cplx{-1.0}, B, cplx{1.0});
      P = R;
      Rt = R;
      continue;
    }
    apply_prec(op, S, ZS, rep);
    op.apply(ZS, T);
    cplx num{}, den{};
    for (std::size_t e = 0; e < T.a.size(); ++e) {
      num += std::conj(T.a[e]) * S.a[e];
      den += std::conj(T.a[e]) * T.a[e];
    }
    if (std::abs(den) == 0.0) {
      try_restart(rep.cycles);
      continue;
    }
    const cplx omega = num / den;
    add_block_scaled(X, ZP, alpha);
    parallel_for(0, static_cast<std::int64_t>(X.a.size()), [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t e = lo; e < hi; ++e) {
        X.a[e] += omega * ZS.a[e];
        R.a[e] = S.a[e] - omega * T.a[e];
      }
    });
    record_convergence(rep, col_norms(R), bnorm, tol, rep.cycles);
    if (rep.history.back() <= tol) {
      finalize(op, B, X, bnorm, tol, rep);
      if (rep.all_converged()) break;
      op.apply(X, R);
      axpby(R, cplx{-1.0}, B, cplx{1.0});
      P = R;
      Rt = R;
      continue;
    }
    DenseMat<cplx> RtT = gram(Rt, T);
    ++rep.block_gram_products;
    for (auto& x : RtT.a) x = -x;
    DenseMat<cplx> beta;
    try {
      beta = solve_small(RtV, RtT);  // RtV untouched by solve_small (copied)
    } catch (const FactorizationError&) {
      try_restart(rep.cycles);
      continue;
    }
    // P = R + (P - omega V) beta
    BlockVec<cplx> PmV = P;
    axpby(PmV, cplx{1.0}, V, -omega);
    P = R;
    add_block_scaled(P, PmV, beta);
    if (!op.prec) ++rep.cycles;  // count matvec pairs when unpreconditioned
  }
  if (rep.rel_residual.empty()) finalize(op, B, X, bnorm, tol, rep);
  rep.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return {std::move(X), std::move(rep)};
}

std::pair<BlockVec<cplx>, SolveReport> block_fgmres(const BlockOperator& op,
                                                    const BlockVec<cplx>& B, int restart,
                                                    double tol, int max_cycles, bool flexible) {
  (void)flexible;  // directions are always stored; a stationary prec just makes them coincide
  const auto t0 = Clock::now();
  const std::int64_t n = B.n;
  const int k = B.k;
  SolveReport rep;
  rep.col_cycles.assign(k, -1);
  const auto bnorm = rhs_norms(B);

  BlockVec<cplx> X(n, k);
  BlockVec<cplx> R = B;
  bool done = false;
  {
    const auto r0 = col_norms(R);
    done = true;
    for (int j = 0; j < k; ++j) done = done && r0[j] / bnorm[j] <= tol;
  }
  while (!done && rep.cycles < max_cycles) {
    // Arnoldi from the current residual
    DenseMat<cplx> S0;
    std::vector<BlockVec<cplx>> V;
    std::vector<BlockVec<cplx>> Z;
    V.emplace_back(R);
    bool rd = false;
    thin_qr(V[0], S0, &rd);
    ++rep.qr_factorizations;
    const int m = restart;
    // Block Hessenberg, stored as (m+1) x m grid of k x k tiles
    std::vector<std::vector<DenseMat<cplx>>> H(m + 1,
                                               std::vector<DenseMat<cplx>>(m, DenseMat<cplx>(k, k)));
    int j = 0;
    for (; j < m && rep.cycles < max_cycles; ++j) {
      BlockVec<cplx> Zj(n, k);
      apply_prec(op, V[j], Zj, rep);
      if (!op.prec) ++rep.cycles;
      BlockVec<cplx> W(n, k);
      op.apply(Zj, W);
      Z.push_back(std::move(Zj));
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) {
          DenseMat<cplx> Hij = gram(V[i], W);
          ++rep.block_gram_products;
          DenseMat<cplx> neg = Hij;
          for (auto& x : neg.a) x = -x;
          add_block_scaled(W, V[i], neg);
          for (std::int64_t e = 0; e < k * k; ++e) H[i][j].a[e] += Hij.a[e];
        }
      bool deficient = false;
      thin_qr(W, H[j + 1][j], &deficient);
      ++rep.qr_factorizations;
      V.push_back(std::move(W));
      if (deficient) {
        ++j;
        break;  // happy breakdown: solve with the basis built so far
      }
      // cheap residual estimate once per iteration via the small LS problem
      const int rows = (j + 2) * k, cols = (j + 1) * k;
      DenseMat<cplx> Hbar(rows, cols), rhs(rows, k);
      for (int bi = 0; bi <= j + 1; ++bi)
        for (int bj = 0; bj <= j; ++bj)
          for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q) Hbar(bi * k + p, bj * k + q) = H[bi][bj](p, q);
      for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) rhs(p, q) = S0(p, q);
      std::vector<double> res;
      least_squares(std::move(Hbar), std::move(rhs), &res);
      record_convergence(rep, res, bnorm, tol, rep.cycles);
      if (rep.history.back() <= tol) {
        ++j;
        break;
      }
    }
    if (j == 0) break;
    // solve the projected least-squares problem and update X
    const int rows = (j + 1) * k, cols = j * k;
    DenseMat<cplx> Hbar(rows, cols), rhs(rows, k);
    for (int bi = 0; bi <= j; ++bi)
      for (int bj = 0; bj < j; ++bj)
        for (int p = 0; p < k; ++p)
          for (int q = 0; q < k; ++q) Hbar(bi * k + p, bj * k + q) = H[bi][bj](p, q);
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q) rhs(p, q) = S0(p, q);
    DenseMat<cplx> Y = least_squares(std::move(Hbar), std::move(rhs), nullptr);
    for (int bj = 0; bj < j; ++bj) {
      DenseMat<cplx> Yj(k, k);
      for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) Yj(p, q) = Y(bj * k + p, q);
      add_block_scaled(X, Z[bj], Yj);
    }
    // true residual for the restart / convergence decision
    op.apply(X, R);
    axpby(R, cplx{-1.0}, B, cplx{1.0});
    const auto rn = col_norms(R);
    double worst = 0.0;
    for (int c = 0; c < k; ++c) worst = std::max(worst, rn[c] / bnorm[c]);
    if (worst <= tol) done = true;
  }
  finalize(op, B, X, bnorm, tol, rep);
  rep.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return {std::move(X), std::move(rep)};
}

PcgResult pcg(const RealOperator& op, const Field& b, double tol, int maxit) {
  const auto t0 = Clock::now();
  PcgResult out;
  SolveReport& rep = out.report;
  rep.col_cycles.assign(1, -1);
  const std::int64_t n = op.n;
  Field& x = out.x;
  x.assign(n, 0.0);
  Field r = b, z(n), p(n), Ap(n);
  double bn = 0.0;
  for (double v : b) bn += v * v;
  bn = std::sqrt(bn);
  if (bn == 0.0) bn = 1.0;
  auto dot = [](const Field& a, const Field& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * c[i];
    return s;
  };
  if (op.prec)
    op.prec(r, z);
  else
    z = r;
  p = z;
  double rz = dot(r, z);
  for (int it = 0; it < maxit; ++it) {
    op.apply(p, Ap);
    const double pAp = dot(p, Ap);
    if (pAp <= 0.0) {
      out.negative_curvature = true;
      break;
    }
    const double alpha = rz / pAp;
    for (std::int64_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    ++rep.cycles;
    double rn = 0.0;
    for (double v : r) rn += v * v;
    rn = std::sqrt(rn);
    rep.history.push_back(rn / bn);
    if (rep.col_cycles[0] < 0 && rn / bn <= tol) rep.col_cycles[0] = rep.cycles;
    if (rn / bn <= tol) break;
    if (op.prec)
      op.prec(r, z);
    else
      z = r;
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::int64_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  // recompute the reported residual from the returned solution
  op.apply(x, Ap);
  double rn = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double d = b[i] - Ap[i];
    rn += d * d;
  }
  rn = std::sqrt(rn);
  rep.rel_residual = {rn / bn};
  rep.converged = {static_cast<char>(rn / bn <= tol ? 1 : 0)};
  if (rep.col_cycles[0] < 0) rep.col_cycles[0] = rep.cycles;
  rep.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

PcgResult projected_pcg(const RealOperator& op, const Field& b,
                        const std::vector<std::uint8_t>& inactive_mask, double tol, int maxit) {
  if (static_cast<std::int64_t>(inactive_mask.size()) != op.n)
    throw ValidationError("projected_pcg: mask size mismatch");
  auto mask = [&inactive_mask](Field& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!inactive_mask[i]) v[i] = 0.0;
  };
  RealOperator masked;
  masked.n = op.n;
  masked.apply = [&op, mask](const Field& v, Field& out) {
    Field vm = v;
    mask(vm);
    op.apply(vm, out);
    mask(out);
  };
  if (op.prec)
    masked.prec = [&op, mask](const Field& v, Field& out) {
      Field vm = v;
      mask(vm);
      op.prec(vm, out);
      mask(out);
    };
  Field bm = b;
  mask(bm);
  return pcg(masked, bm, tol, maxit);
}

}  // namespace seistomo
