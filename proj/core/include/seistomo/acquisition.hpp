#pragma once

#include <vector>

#include "seistomo/grid.hpp"

namespace seistomo {

/// Physical source/receiver layout with per-source offset gating:
/// receiver r records source s iff offset_min <= dist(s, r) <= offset_max.
struct AcquisitionGeometry {
  std::vector<std::array<double, 3>> sources;
  std::vector<std::array<double, 3>> receivers;
  double offset_min = 0.0;
  double offset_max = 0.0;
  std::vector<std::vector<std::uint8_t>> active;  // [source][receiver]

  AcquisitionGeometry() = default;
  AcquisitionGeometry(std::vector<std::array<double, 3>> src,
                      std::vector<std::array<double, 3>> rec, double omin, double omax,
                      const RegularGrid& core_grid);

  std::size_t num_sources() const { return sources.size(); }
  std::size_t num_receivers() const { return receivers.size(); }
  bool is_active(std::size_t s, std::size_t r) const { return active[s][r] != 0; }
};

/// The interpolating sampling matrix P of the data equation: each receiver
/// row carries multilinear weights over the <= 2^ndim enclosing nodes
/// (nonnegative, summing to 1). sample computes P^T u, sample_adjoint
/// computes P d.
class SamplingOperator {
public:
  SamplingOperator() = default;
  SamplingOperator(const AcquisitionGeometry& geom, const RegularGrid& grid);

  std::size_t num_receivers() const { return nodes_.size(); }
  const RegularGrid& grid() const { return grid_; }

  template <class S>
  std::vector<S> sample(const std::vector<S>& u) const {
    if (static_cast<std::int64_t>(u.size()) != grid_.num_nodes())
      throw ValidationError("sample: field size does not match grid");
    std::vector<S> d(nodes_.size(), S{});
    for (std::size_t r = 0; r < nodes_.size(); ++r) {
      S acc{};
      for (std::size_t q = 0; q < nodes_[r].size(); ++q)
        acc += static_cast<S>(weights_[r][q]) * u[nodes_[r][q]];
      d[r] = acc;
    }
    return d;
  }

  template <class S>
  std::vector<S> sample_adjoint(const std::vector<S>& d) const {
    if (d.size() != nodes_.size()) throw ValidationError("sample_adjoint: receiver count mismatch");
    std::vector<S> u(grid_.num_nodes(), S{});
    for (std::size_t r = 0; r < nodes_.size(); ++r)
      for (std::size_t q = 0; q < nodes_[r].size(); ++q)
        u[nodes_[r][q]] += static_cast<S>(weights_[r][q]) * d[r];
    return u;
  }

  const std::vector<std::int64_t>& receiver_nodes(std::size_t r) const { return nodes_[r]; }
  const std::vector<double>& receiver_weights(std::size_t r) const { return weights_[r]; }

private:
  RegularGrid grid_;
  std::vector<std::vector<std::int64_t>> nodes_;
  std::vector<std::vector<double>> weights_;
};

}  // namespace seistomo
