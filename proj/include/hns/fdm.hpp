#pragma once

#include <functional>

#include "hns/grid.hpp"

namespace hns {

/// Scalar fractional ODE D_t^alpha u = a(t) u + b(t), u(0) = u0, marched
/// with the classical L1 scheme. The affine right-hand side admits an
/// explicit per-step solve.
struct FdeInstance {
  FracOrder alpha;
  std::function<double(double)> a;
  std::function<double(double)> b;
  double u0;
  TimeGrid grid;
};

/// Time march n = 1..N; throws on a singular per-step coefficient.
ScalarField1D solve_fde_l1(const FdeInstance& instance);

/// The benchmark instance: rhs u + Gamma(3)/Gamma(3-alpha) t^(2-alpha)
/// - t^2 - 1 with u0 = 1 (exact solution 1 + t^2).
FdeInstance make_benchmark_fde(double alpha, int mt, double T = 2.0);

/// Relative L2 error of the nodal L1 solution against 1 + t^2.
double fdm_benchmark_error(double alpha, int mt, double T = 2.0);

} // namespace hns
