#pragma once

#include <string>

#include "seistomo/acquisition.hpp"
#include "seistomo/model.hpp"

namespace seistomo {

/// Factored first-arrival solution tau = tau0 * tau1 where
/// tau0(x) = ||x - x_s||_2 is analytic and tau1 solves the factored
/// eikonal equation (tau1 == sqrt(m) exactly for constant media).
struct FactoredEikonalSolution {
  RegularGrid grid;
  std::array<double, 3> source{};  // snapped to the nearest node
  std::int64_t source_node = -1;
  Field tau1;

  Field tau0() const;
  Field travel_time() const;  // tau0 (.) tau1
};

/// Everything needed to re-apply the first-order upwind operators chosen by
/// fast marching: the acceptance order, one base-5 direction code per node
/// (digit per axis: 0 none, 1 backward, 2 forward; two values reserved for
/// higher order), and tau1 in single precision. 72 bits per node.
struct SensitivityRecord {
  RegularGrid grid;
  std::array<double, 3> source{};
  std::vector<std::uint32_t> fm_order;
  std::vector<std::uint8_t> direction_codes;
  std::vector<float> tau1;

  static constexpr int bits_per_node = 72;

  /// JSER1 file: "JSER1 <nnodes>\n" then fm_order (u32 LE), direction_codes
  /// (u8), tau1 (f32 LE), concatenated. Grid and source are carried by the
  /// caller.
  void save(const std::string& path) const;
  static SensitivityRecord load(const std::string& path, RegularGrid grid,
                                std::array<double, 3> source);
};

/// Fast marching on the factored Godunov upwind discretization. x_s snaps
/// to the nearest node; tau1 there is fixed to sqrt(m(x_s)).
std::pair<FactoredEikonalSolution, SensitivityRecord> fm_solve(const SlownessSquaredModel& m,
                                                               const std::array<double, 3>& x_s);

/// J v = tau0 (.) z where the triangular system from the recorded upwind
/// choices is forward-substituted in fm order (O(n), rows materialized on
/// the fly); zero-code rows yield z = 0.
Field eik_jacobian_vec(const SensitivityRecord& rec, const Field& v);
/// J^T w by the transposed sweep in reverse fm order.
Field eik_jacobian_transpose_vec(const SensitivityRecord& rec, const Field& w);

/// Max relative defect of the Godunov equation evaluated with the recorded
/// upwind choices against m (diagnostic; ~1e-15 for a fresh double-precision
/// solve).
double gudonov_residual(const SensitivityRecord& rec, const Field& tau1_full,
                        const SlownessSquaredModel& m);

}  // namespace seistomo
