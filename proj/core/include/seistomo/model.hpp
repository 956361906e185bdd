#pragma once

#include <string>

#include "seistomo/grid.hpp"

namespace seistomo {

/// The shared inversion unknown m = 1/c^2 (s^2/m^2), node values on a grid.
struct SlownessSquaredModel {
  RegularGrid grid;
  Field values;

  SlownessSquaredModel() = default;
  SlownessSquaredModel(RegularGrid g, Field v);
};

SlownessSquaredModel velocity_to_slowness_squared(const RegularGrid& grid, const Field& velocity);
Field slowness_squared_to_velocity(const SlownessSquaredModel& m);

/// A core model surrounded by replicated-boundary padding for the
/// absorbing layer. The pad region copies the nearest core value along
/// each axis, so restricting the padded model to the core window
/// reproduces the core exactly.
struct PaddedModel {
  SlownessSquaredModel core;
  PerSideWidths pad;
  SlownessSquaredModel padded;
};

PaddedModel pad_model(const SlownessSquaredModel& core, const PerSideWidths& pad);

/// Grid of the padded model without building values.
RegularGrid padded_grid(const RegularGrid& core, const PerSideWidths& pad);

/// The replication map E: core fields -> padded fields, and its adjoint.
/// pad_model's values satisfy padded = E(core); gradients of padded-grid
/// functionals pull back through pad_adjoint.
Field pad_extend(const RegularGrid& core, const PerSideWidths& pad, const Field& core_field);
Field pad_adjoint(const RegularGrid& core, const PerSideWidths& pad, const Field& padded_field);
Field restrict_to_core(const RegularGrid& core, const PerSideWidths& pad, const Field& padded_field);

/// Grow high-side pad widths until every padded axis supports
/// `nlevels - 1` standard coarsenings ((n-1) divisible by 2^(nlevels-1)).
/// Returns the adjusted widths and reports how many nodes were added.
PerSideWidths extend_pad_for_coarsening(const RegularGrid& core, PerSideWidths pad, int nlevels,
                                        std::array<int, 3>* added = nullptr);

/// JSSM1 model file: ASCII header "JSSM1 <ndim> <n1> <n2> [<n3>] <h1> <h2> [<h3>]\n"
/// followed by raw little-endian 32-bit floats, first axis fastest.
void write_model_file(const std::string& path, const SlownessSquaredModel& m);
SlownessSquaredModel read_model_file(const std::string& path);

}  // namespace seistomo
