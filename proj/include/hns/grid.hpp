#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hns {

/// Fractional order alpha restricted to (0, 1).
struct FracOrder {
  double alpha;

  explicit FracOrder(double a) : alpha(a) {
    if (!(a > 0.0 && a < 1.0)) {
      throw std::domain_error("FracOrder: alpha must lie in (0, 1)");
    }
  }
};

/// Uniform temporal grid t_k = k * dt on [0, T] with N steps (N + 1 nodes).
struct TimeGrid {
  double horizon;
  int steps;
  double dt;
  std::vector<double> nodes;

  TimeGrid(double T, int N) : horizon(T), steps(N), dt(T / N) {
    if (!(T > 0.0) || N < 1) {
      throw std::invalid_argument("TimeGrid: need T > 0 and N >= 1");
    }
    nodes.resize(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) nodes[static_cast<std::size_t>(k)] = k * dt;
    nodes.back() = T;
  }

  int node_count() const { return steps + 1; } // M_t = N + 1
};

/// Nodal samples of a scalar function of time, optionally with nodal
/// derivative values of order 1 and 2. All populated lists must have the
/// same length as the grid.
struct ScalarField1D {
  std::vector<double> values;
  std::vector<double> d1; // empty when not provided
  std::vector<double> d2;

  const std::vector<double>& order(int d) const {
    switch (d) {
      case 0: return values;
      case 1: return d1;
      case 2: return d2;
      default: throw std::invalid_argument("ScalarField1D: order must be 0..2");
    }
  }

  bool has_order(int d) const {
    return d == 0 ? !values.empty() : (d == 1 ? !d1.empty() : !d2.empty());
  }

  void check_lengths() const {
    const std::size_t n = values.size();
    if (n == 0) throw std::invalid_argument("ScalarField1D: empty values");
    if (!d1.empty() && d1.size() != n)
      throw std::invalid_argument("ScalarField1D: d1 length mismatch");
    if (!d2.empty() && d2.size() != n)
      throw std::invalid_argument("ScalarField1D: d2 length mismatch");
  }
};

} // namespace hns
