#pragma once

#include <cstdint>
#include <vector>

namespace hns {

using Point = std::vector<double>;

/// Tensor-product grid on [0,1]^d with the interior/boundary split.
struct GridSample {
  std::vector<Point> points;
  std::vector<bool> boundary; // per point: any coordinate on {0, 1}
  int interior_count = 0;
  int boundary_count = 0;
};

/// Equidistant tensor grid, per_axis_count nodes per axis (>= 2).
/// spatial_dim = 0 yields the single empty point (the ODE case).
GridSample sample_equidistant(int spatial_dim, int per_axis_count);

/// Latin hypercube design on (0,1)^d: each axis projection occupies one
/// point per stratum. Deterministic under seed.
std::vector<Point> sample_lhs(int spatial_dim, int count, std::uint64_t seed);

} // namespace hns
