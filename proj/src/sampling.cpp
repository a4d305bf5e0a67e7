#include "hns/sampling.hpp"

#include <random>
#include <stdexcept>

namespace hns {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

GridSample sample_equidistant(int spatial_dim, int per_axis_count) {
  GridSample g;
  if (spatial_dim == 0) {
    g.points.push_back({});
    g.boundary.push_back(false);
    g.interior_count = 1;
    return g;
  }
  if (spatial_dim < 0 || per_axis_count < 2) {
    throw std::invalid_argument("sample_equidistant: need dim >= 0, count >= 2");
  }
  const int m = per_axis_count;
  std::size_t total = 1;
  for (int d = 0; d < spatial_dim; ++d) total *= static_cast<std::size_t>(m);
  g.points.reserve(total);
  g.boundary.reserve(total);
  std::vector<int> idx(static_cast<std::size_t>(spatial_dim), 0);
  for (std::size_t p = 0; p < total; ++p) {
    Point pt(static_cast<std::size_t>(spatial_dim));
    bool on_boundary = false;
    for (int d = 0; d < spatial_dim; ++d) {
      const int i = idx[static_cast<std::size_t>(d)];
      pt[static_cast<std::size_t>(d)] = static_cast<double>(i) / (m - 1);
      if (i == 0 || i == m - 1) on_boundary = true;
    }
    g.points.push_back(std::move(pt));
    g.boundary.push_back(on_boundary);
    if (on_boundary) {
      ++g.boundary_count;
    } else {
      ++g.interior_count;
    }
    for (int d = spatial_dim - 1; d >= 0; --d) {
      if (++idx[static_cast<std::size_t>(d)] < m) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
  }
  return g;
}

std::vector<Point> sample_lhs(int spatial_dim, int count, std::uint64_t seed) {
  if (spatial_dim < 1 || count < 1) {
    throw std::invalid_argument("sample_lhs: need dim >= 1, count >= 1");
  }
  std::mt19937_64 rng(seed);
  std::vector<Point> pts(static_cast<std::size_t>(count),
                         Point(static_cast<std::size_t>(spatial_dim)));
  std::vector<int> perm(static_cast<std::size_t>(count));
  for (int d = 0; d < spatial_dim; ++d) {
    for (int i = 0; i < count; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = count - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
    }
    for (int i = 0; i < count; ++i) {
      const double u = uniform01(rng);
      pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] =
          (perm[static_cast<std::size_t>(i)] + u) / count;
    }
  }
  return pts;
}

} // namespace hns
