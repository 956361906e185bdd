#pragma once

#include <functional>

#include "seistomo/block.hpp"

namespace seistomo {

/// Matrix-free operator handle for the block solvers. apply must be linear;
/// prec (when set) is applied once per preconditioning cycle. BiCGSTAB
/// requires a stationary (fixed linear) preconditioner; only FGMRES admits
/// one that changes between iterations (e.g. a K-cycle).
struct BlockOperator {
  std::int64_t n = 0;
  std::function<void(const BlockVec<cplx>&, BlockVec<cplx>&)> apply;
  std::function<void(const BlockVec<cplx>&, BlockVec<cplx>&)> prec;  // optional
};

struct SolveReport {
  int cycles = 0;                      // preconditioner applications (matvecs if unpreconditioned)
  std::vector<int> col_cycles;         // first cycle at which each column met tol
  std::vector<double> rel_residual;    // recomputed from the returned solution
  std::vector<char> converged;
  std::vector<double> history;         // worst-column relative recursion residual per iteration
  double wall_s = 0.0;
  int qr_factorizations = 0;           // thin QR count (FGMRES cost note)
  std::int64_t block_gram_products = 0;

  bool all_converged() const {
    for (char c : converged)
      if (!c) return false;
    return !converged.empty();
  }
  double mean_col_cycles() const {
    if (col_cycles.empty()) return 0.0;
    double s = 0.0;
    for (int c : col_cycles) s += c;
    return s / static_cast<double>(col_cycles.size());
  }
};

/// Block BiCGSTAB (right-preconditioned) for multiple right-hand sides.
/// Convergence is declared when the worst column meets tol; reported
/// residuals are recomputed from the returned solution. Breakdown of the
/// k x k recurrence systems restarts from the current iterate at most
/// twice, then throws BreakdownError.
std::pair<BlockVec<cplx>, SolveReport> block_bicgstab(const BlockOperator& op,
                                                      const BlockVec<cplx>& B, double tol,
                                                      int max_cycles);

/// Block FGMRES(restart) with batched thin-QR orthonormalization of the
/// block Krylov basis; flexible variant stores preconditioned directions so
/// the preconditioner may vary per iteration.
std::pair<BlockVec<cplx>, SolveReport> block_fgmres(const BlockOperator& op,
                                                    const BlockVec<cplx>& B, int restart,
                                                    double tol, int max_cycles,
                                                    bool flexible = true);

struct RealOperator {
  std::int64_t n = 0;
  std::function<void(const Field&, Field&)> apply;
  std::function<void(const Field&, Field&)> prec;  // optional, must be SPD
};

struct PcgResult {
  Field x;
  SolveReport report;
  bool negative_curvature = false;  // operator was not PSD on the search space
};

PcgResult pcg(const RealOperator& op, const Field& b, double tol, int maxit);

/// PCG restricted to the inactive subspace: coordinates where
/// inactive_mask == 0 are pinned to zero in every vector operation.
PcgResult projected_pcg(const RealOperator& op, const Field& b,
                        const std::vector<std::uint8_t>& inactive_mask, double tol, int maxit);

}  // namespace seistomo
