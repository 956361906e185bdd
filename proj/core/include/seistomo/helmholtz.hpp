#pragma once

#include <string>

#include "seistomo/acquisition.hpp"
#include "seistomo/attenuation.hpp"
#include "seistomo/block.hpp"
#include "seistomo/csr.hpp"
#include "seistomo/model.hpp"

namespace seistomo {

/// Discrete Helmholtz operator A(m, omega) = Lap_h + omega^2 (1 - i gamma/omega) m
/// on the padded grid: complex-symmetric 5-point (2D) / 7-point (3D) stencil
/// with center -(sum 2/h_k^2) + omega^2 (1 - i gamma/omega) m and off-diagonal
/// 1/h_k^2. Boundary rows use the truncated stencil (homogeneous Dirichlet
/// outside the padded domain); the absorbing layer makes the outer condition
/// immaterial.
class HelmholtzProblem {
public:
  /// Throws unless the grid resolves ten points per wavelength
  /// (2*pi / (omega * sqrt(max m) * min h) >= 10) or allow_coarse is set.
  HelmholtzProblem(SlownessSquaredModel m_padded, double omega, AttenuationField gamma,
                   bool allow_coarse_ppw = false);

  const RegularGrid& grid() const { return m_.grid; }
  const SlownessSquaredModel& model() const { return m_; }
  const AttenuationField& attenuation() const { return gamma_; }
  double omega() const { return omega_; }
  double points_per_wavelength() const;

  /// Complex mass coefficient omega^2 (1 - i gamma/omega) m per node.
  const CField& mass() const { return mass_; }
  /// The data-weighting factor (1 - i gamma/omega) per node (appears in the
  /// sensitivity).
  const CField& gamma_factor() const { return gamma_factor_; }

  void apply(const CField& u, CField& out) const;
  void apply_block(const BlockVec<cplx>& u, BlockVec<cplx>& out) const;

  /// Materialize A with gamma shifted by shift_factor * omega (the shifted
  /// Laplacian preconditioner operator; shift_factor = 0 gives A itself).
  Csr<cplx> to_csr(double shift_factor = 0.0) const;

  /// Finite-volume point source: amplitude / prod(h) at the node nearest x_s
  /// (ties toward the lower index).
  CField point_source(const std::array<double, 3>& x_s, cplx amplitude) const;

private:
  SlownessSquaredModel m_;
  double omega_;
  AttenuationField gamma_;
  CField mass_;
  CField gamma_factor_;
  double inv_h2_[3] = {0, 0, 0};
  double center_lap_ = 0.0;
};

enum class StoragePrecision { Full32, Compact16 };

/// Solved wavefields for a batch of sources. Full storage keeps
/// complex<double>; compact storage quantizes components to binary16
/// against a per-source power-of-two scale (roundtrip error per entry
/// below 2^-10 of the field's peak magnitude).
class WavefieldBatch {
public:
  WavefieldBatch() = default;
  WavefieldBatch(RegularGrid grid, StoragePrecision precision)
      : grid_(std::move(grid)), precision_(precision) {}

  void append(int source_id, const CField& u);
  CField field(std::size_t idx) const;
  int source_id(std::size_t idx) const { return source_ids_[idx]; }
  std::size_t size() const { return source_ids_.size(); }
  StoragePrecision precision() const { return precision_; }
  const RegularGrid& grid() const { return grid_; }

  /// JSWF1 cache file: "JSWF1 <nsrc> <nnodes> <precision>\n" then per-source
  /// interleaved (re, im) components in the declared precision (f32 or f16),
  /// little-endian.
  void save(const std::string& path) const;
  static WavefieldBatch load(const std::string& path, RegularGrid grid);

private:
  RegularGrid grid_;
  StoragePrecision precision_ = StoragePrecision::Full32;
  std::vector<int> source_ids_;
  std::vector<CField> full_;
  struct Compact {
    double scale = 1.0;
    std::vector<std::uint16_t> re_im;
  };
  std::vector<Compact> compact_;
};

}  // namespace seistomo
