#pragma once

#include <array>
#include <span>
#include <vector>

#include "hns/grid.hpp"
#include "hns/hermite.hpp"

namespace hns {

/// mu_j(l, a) = \int_0^1 tau^j (l + 1 - tau)^(-a) dtau, the lag-l moment of
/// the weakly singular kernel in the local interval variable. Closed form
/// for j = 0 and lag 0; a positive-term hypergeometric series otherwise
/// (no cancellation for any lag).
double moment_integral(int j, int lag, FracOrder alpha);

/// Dimensionless per-lag quadrature kernels for one (p, alpha).
/// On the interval with lag l (i.e. [t_(n-1-l), t_(n-l)] when targeting
/// t_n), the contribution of the order-d nodal derivative is
///   dt^(d - alpha) / Gamma(1 - alpha) * kernel[d][side] * u^(d)(node),
/// side 0 being the left node and side 1 the right node. The kernels do not
/// depend on n or dt (translation invariance of the uniform grid).
struct LagKernel {
  std::array<std::array<double, 2>, 3> k{}; // [d][side], d <= (p-1)/2
};

class KernelTable {
 public:
  KernelTable(int p, FracOrder alpha);

  /// Kernel for lag l, computed on first use and cached.
  const LagKernel& lag(int l);

  /// Precompute lags 0..max_lag.
  void reserve(int max_lag);

  int degree() const { return p_; }
  double alpha() const { return alpha_; }
  int max_deriv() const { return (p_ - 1) / 2; }

 private:
  int p_;
  double alpha_;
  HermiteBasis basis_;
  std::vector<Poly> dbasis_; // derivatives of the basis polynomials
  std::vector<LagKernel> kernels_;
};

/// Fully assembled quadrature weights approximating D_t^alpha u(t_n) from
/// nodal values and derivatives on a uniform grid with step dt.
struct HermiteStencil {
  int p;
  double alpha;
  int n;
  double dt;
  struct PairWeights {
    std::array<double, 3> left{};  // per derivative order d
    std::array<double, 3> right{};
  };
  std::vector<PairWeights> weights; // index = lag l = 0..n-1

  int max_deriv() const { return (p - 1) / 2; }
};

/// Combine Hermite basis derivatives with the kernel moments and the
/// 1/Gamma(1-alpha) prefactor. n = 0 yields an empty stencil (the Caputo
/// sum at t = 0 is empty).
HermiteStencil build_stencil(int p, FracOrder alpha, int n, double dt);

/// Weighted sum approximating D_t^alpha u(t_n). The field must supply
/// derivative orders 0..(p-1)/2 at nodes 0..n; compensated summation keeps
/// the roundoff floor near machine precision for convergence studies.
double apply_stencil(const HermiteStencil& stencil, const ScalarField1D& field);

/// Right-hand side of the degree-p approximation error bound:
///   1/((p+1)! Gamma(1-a)) [ 2^-(p+1)
///     + a Gamma((3+p)/2) Gamma((1-2a+p)/2) / Gamma(2-a+p) ]
///   * max_deriv * dt^(p+1-a).
double error_bound(int p, FracOrder alpha, double dt, double max_deriv);

/// Least-squares slope of log(error) against log(dt).
double estimate_order(std::span<const double> dts,
                      std::span<const double> errors);

/// Per-node dimensionless kernels of the n-target stencil, for inspection
/// and regression: row lag l refers to node t_(n-l), derivative order d.
struct KernelRow {
  int p;
  double alpha;
  int lag;
  int d;
  double kernel;
};
std::vector<KernelRow> kernel_dump(int p, FracOrder alpha, int n);

} // namespace hns
