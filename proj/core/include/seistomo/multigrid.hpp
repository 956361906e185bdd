#pragma once

#include <array>
#include <memory>

#include "seistomo/csr.hpp"
#include "seistomo/dense.hpp"
#include "seistomo/helmholtz.hpp"

namespace seistomo {

enum class CycleKind { V, W, K };

/// Block multigrid cycle parameters. K-cycles accelerate the coarse
/// correction with k_inner block FGMRES iterations preconditioned by the
/// next-coarser cycle.
struct CycleSpec {
  CycleKind kind = CycleKind::W;
  int pre = 2;
  int post = 2;
  double jacobi_weight = 0.8;
  int k_inner = 2;
};

template <class S>
struct MgLevel {
  Csr<S> A;
  std::vector<S> inv_diag;
  std::array<std::int64_t, 3> dims{1, 1, 1};
  Csr<S> P;  // prolongation to this level from the next-coarser one
  Csr<S> R;  // restriction = P^T, materialized
};

/// Geometric hierarchy with Galerkin-coarsened operators
/// (A_{l+1} = P^T A_l P, bilinear/trilinear P, R = P^T) and a banded LU of
/// the coarsest operator, factored once and reused for all block solves.
/// Levels are immutable after build; cycles allocate their own workspace so
/// distinct blocks may be cycled concurrently. All operators here are
/// (complex) symmetric, so a transposed solve reuses the same hierarchy.
template <class S>
class MgHierarchy {
public:
  /// Galerkin hierarchy over an assembled fine operator on a structured
  /// grid with the given per-axis node counts. Throws ValidationError
  /// naming the axis when dims do not permit the requested coarsenings.
  static MgHierarchy build(Csr<S> a0, std::array<std::int64_t, 3> dims, int nlevels);

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const MgLevel<S>& level(int l) const { return levels_[l]; }

  /// One block cycle of the given kind on the level-0 system A X = B,
  /// updating X in place.
  void cycle(const CycleSpec& spec, const BlockVec<S>& b, BlockVec<S>& x) const {
    cycle_rec(0, spec, b, x);
  }

  /// Direct solve of the coarsest system for all columns via the stored
  /// factorization (in place).
  void coarse_solve(BlockVec<S>& b) const;

  std::int64_t coarse_lu_bytes() const { return coarse_lu_.bytes(); }

private:
  void cycle_rec(int l, const CycleSpec& spec, const BlockVec<S>& b, BlockVec<S>& x) const;
  void relax(int l, const CycleSpec& spec, int sweeps, const BlockVec<S>& b, BlockVec<S>& x) const;
  void kcycle_coarse(int l, const CycleSpec& spec, const BlockVec<S>& b, BlockVec<S>& x) const;

  std::vector<MgLevel<S>> levels_;
  BandedLU<S> coarse_lu_;
};

extern template class MgHierarchy<double>;
extern template class MgHierarchy<cplx>;

/// Hierarchy for a Helmholtz problem: level 0 is the shifted operator
/// (gamma + shift_factor * omega), coarser levels by Galerkin products.
MgHierarchy<cplx> build_hierarchy(const HelmholtzProblem& problem, int nlevels,
                                  double shift_factor = 0.2);

/// Bilinear/trilinear prolongation between structured grids (standard
/// (n-1)/2 + 1 coarsening per axis; axes of size 1 pass through).
template <class S>
Csr<S> build_prolongation(const std::array<std::int64_t, 3>& fine,
                          const std::array<std::int64_t, 3>& coarse);

/// Next-coarser dims; throws ValidationError naming the first axis that
/// cannot be coarsened (even node count or fewer than 3 coarse nodes).
std::array<std::int64_t, 3> coarsen_dims(const std::array<std::int64_t, 3>& dims);

}  // namespace seistomo
