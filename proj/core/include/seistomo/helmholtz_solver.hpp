#pragma once

#include <memory>
#include <optional>

#include "seistomo/helmholtz.hpp"
#include "seistomo/krylov.hpp"
#include "seistomo/multigrid.hpp"

namespace seistomo {

enum class HelmholtzMethod { MgBicgstab, MgFgmresW, MgFgmresK, DenseLuSmall };

struct HelmholtzSolveOptions {
  HelmholtzMethod method = HelmholtzMethod::MgBicgstab;
  double tol = 1e-6;  // per-column relative residual target
  int max_cycles = 200;
  int nlevels = 3;
  double shift_factor = 0.2;
  CycleSpec cycle{};  // kind is derived from method
  int fgmres_restart = 5;
  std::int64_t dense_threshold = 3000;  // node cap for DenseLuSmall
  bool allow_coarse_ppw = false;
};

/// Amortizes the preconditioner setup (multigrid hierarchy or dense
/// factorization) for one (m, omega) pair across many right-hand sides,
/// sensitivity products and transposed solves (the operators are complex
/// symmetric, so A^T solves reuse the same hierarchy).
class HelmholtzSolver {
public:
  HelmholtzSolver(std::shared_ptr<const HelmholtzProblem> problem, HelmholtzSolveOptions opts);

  const HelmholtzProblem& problem() const { return *problem_; }
  const HelmholtzSolveOptions& options() const { return opts_; }

  /// Solve A X = B for a block of right-hand sides; per-column relative
  /// residual <= tol on success. Does not throw on non-convergence (the
  /// report carries the flags); solve_helmholtz below enforces the contract.
  std::pair<BlockVec<cplx>, SolveReport> solve_block(const BlockVec<cplx>& B) const;
  std::pair<CField, SolveReport> solve(const CField& rhs) const;

  /// Override the tolerance for subsequent solves (sensitivity tests
  /// tighten this).
  void set_tolerance(double tol) { opts_.tol = tol; }

  const MgHierarchy<cplx>* hierarchy() const { return hier_ ? hier_.get() : nullptr; }

private:
  std::shared_ptr<const HelmholtzProblem> problem_;
  HelmholtzSolveOptions opts_;
  std::shared_ptr<MgHierarchy<cplx>> hier_;  // mg methods
  std::shared_ptr<DenseMat<cplx>> dense_lu_;  // dense method
  std::shared_ptr<std::vector<std::int64_t>> dense_piv_;
};

/// Forward-model a batch of sources. Throws ConvergenceError (carrying the
/// residual history) if any column misses the tolerance within the cycle
/// cap.
WavefieldBatch solve_helmholtz(const HelmholtzSolver& solver, const std::vector<CField>& rhs,
                               StoragePrecision precision = StoragePrecision::Full32,
                               SolveReport* report = nullptr);

/// Sensitivity-vector products for the data of one source at the solver's
/// frequency: J v = -omega^2 P^T A^{-1} diag(1 - i gamma/omega) diag(u_s) v
/// applied matrix-free with one solve, and the real-valued transpose
/// J^T w = Re(-omega^2 (1 - i gamma/omega) u_s A^{-1} P conj(w)) with one
/// transposed (= plain, by symmetry) solve. v lives on the padded grid.
std::vector<cplx> fwi_jacobian_vec(const HelmholtzSolver& solver, const CField& u_s,
                                   const SamplingOperator& P, const Field& v);
Field fwi_jacobian_transpose_vec(const HelmholtzSolver& solver, const CField& u_s,
                                 const SamplingOperator& P, const std::vector<cplx>& w);

/// The sensitivity right-hand side -omega^2 (1 - i gamma/omega) u_s v
/// (shared by the vec/transpose paths and the batched inversion loops).
CField fwi_sensitivity_rhs(const HelmholtzProblem& problem, const CField& u_s, const Field& v);
/// Model-space output Re(-omega^2 (1-i gamma/omega) u_s lambda).
Field fwi_sensitivity_output(const HelmholtzProblem& problem, const CField& u_s,
                             const CField& lambda);

}  // namespace seistomo
