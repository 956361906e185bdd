#pragma once

#include <memory>

#include "seistomo/csr.hpp"
#include "seistomo/dense.hpp"
#include "seistomo/grid.hpp"
#include "seistomo/multigrid.hpp"

namespace seistomo {

enum class RegKind { R1Biharmonic, R2Gradient };

/// Tikhonov penalties on the core grid: R1 = ||Lap_h (m - m_ref)||^2
/// (spline smoothing) and R2 = ||grad_h (m - m_ref)||^2, both with mirrored
/// (homogeneous Neumann) boundaries so constants are in the null space.
/// The Hessian 2 L^T L also drives the Gauss-Newton PCG preconditioner
/// (applied through an inner solve of the eps-shifted operator).
class Regularizer {
public:
  Regularizer(RegKind kind, RegularGrid grid, Field m_ref);

  RegKind kind() const { return kind_; }
  const RegularGrid& grid() const { return grid_; }
  const Field& reference() const { return m_ref_; }

  double value(const Field& m) const;
  /// Returns value; writes gradient = 2 L^T L (m - m_ref).
  double value_and_gradient(const Field& m, Field& grad) const;
  /// Hessian product v -> 2 L^T L v.
  void hessian_vec(const Field& v, Field& out) const;

  const Csr<double>& hessian() const { return H_; }

private:
  RegKind kind_;
  RegularGrid grid_;
  Field m_ref_;
  Csr<double> L_;
  Csr<double> H_;  // 2 L^T L
};

/// SPD preconditioner approximating (2 L^T L + eps I)^{-1}, eps =
/// 1e-8 * mean diagonal: a banded direct solve below the size threshold,
/// otherwise a symmetric V-cycle of a Galerkin hierarchy built from the
/// shifted regularizer Hessian (multigrid at omega = 0).
class RegPreconditioner {
public:
  explicit RegPreconditioner(const Regularizer& reg, std::int64_t direct_threshold = 5000);

  void apply(const Field& r, Field& z) const;
  bool uses_direct() const { return direct_ != nullptr; }

private:
  std::shared_ptr<BandedLU<double>> direct_;
  std::shared_ptr<MgHierarchy<double>> mg_;
  CycleSpec spec_;
};

}  // namespace seistomo
