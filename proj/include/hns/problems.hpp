#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hns/grid.hpp"
#include "hns/trial.hpp"

namespace hns {

/// Value and analytic derivatives of a reference solution at one point.
struct ExactJets {
  double value = 0.0;
  double dt = 0.0;
  double dtt = 0.0;
  std::array<double, kMaxCoords> d1{};
  std::array<double, kMaxCoords> d2{};
};

/// One benchmark instance. Residuals are assembled in the normal form
///   D_t^alpha u - beta Lap(u) + gamma (1,..,1).grad(u) - rho u - g(x,t) = 0
/// on the unit box (0,1)^dim x [0, t_final] (dim = 0 is the scalar ODE).
struct PDEProblem {
  std::string id;
  int dim = 0;
  double alpha = 0.5; // true fractional order
  double t_final = 1.0;
  double beta = 0.0;  // diffusion coefficient
  double gamma = 0.0; // advection coefficient along (1,..,1)
  double rho = 0.0;   // linear reaction coefficient
  std::function<double(std::span<const double>, double)> forcing;
  bool has_boundary = false;
  std::function<double(std::span<const double>, double)> boundary;
  InitialFn initial; // empty when I == 0
  std::function<double(std::span<const double>, double)> exact;
  std::function<ExactJets(std::span<const double>, double)> exact_jets;
  std::function<double(std::span<const double>, double)> exact_caputo;

  bool needs_spatial_d2() const { return beta != 0.0; }
  bool needs_spatial_d1() const { return beta != 0.0 || gamma != 0.0; }
};

/// Benchmark catalog ids: fde, tfde, tfade2d, fpde3d, adv10d, inv3d.
std::vector<std::string> builtin_problem_ids();

/// Instantiate a benchmark; alpha <= 0 selects the problem's headline order.
/// Construction spot-checks that the exact solution annihilates the residual
/// (analytic Caputo derivative against operator plus forcing).
PDEProblem make_problem(const std::string& id, double alpha = -1.0);

/// Max residual of the exact solution over sample points, using analytic
/// jets and the analytic Caputo derivative.
double exact_residual_check(const PDEProblem& pb, int npoints,
                            std::uint64_t seed);

} // namespace hns
