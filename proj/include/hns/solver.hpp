#pragma once

#include <cstdint>
#include <functional>

#include "hns/lbfgs.hpp"
#include "hns/problems.hpp"
#include "hns/sampling.hpp"
#include "hns/stencil.hpp"
#include "hns/trial.hpp"

namespace hns {

/// Residual collocation structure: every spatial point is paired with the
/// full time-node ladder. Boundary points likewise carry all time nodes.
struct CollocationSet {
  TimeGrid grid;
  std::vector<Point> interior; // residual points
  std::vector<Point> boundary; // boundary condition points
  // Inverse-problem measurements u(x_i, t_n), n = 1..N, per interior point.
  std::vector<std::vector<double>> data;

  CollocationSet(double T, int N) : grid(T, N) {}
};

struct SolveConfig {
  int p = 3;
  int mt = 11;  // number of time nodes, M_t = N + 1
  int mx = 0;   // spatial budget: per-axis for grid problems, total for LHS
  int nb = -1;  // boundary points (per face for LHS problems); -1 = default
  std::uint64_t seed = 0;
  int iters = 3000;
  double grad_tol = 1e-10;
  int test_points = 0; // 0 = problem default
  int threads = 0;     // 0 = HNS_THREADS env or hardware concurrency
};

struct InverseConfig {
  bool learn_alpha = false;
  bool learn_beta = false;
  bool learn_gamma = false;
  double init_alpha = 0.2;
  double init_beta = 0.2;
  double init_gamma = 0.2;
};

struct SolveReport {
  double rel_l2 = 0.0;
  double final_loss = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  LbfgsStatus status = LbfgsStatus::converged;
  std::vector<TracePoint> trace;
  // Inverse estimates (NaN when not learned).
  double alpha_hat, beta_hat, gamma_hat;
};

/// Collocation sets per problem: tensor grids for the low-dimensional
/// benchmarks, Latin hypercube designs in high dimension. with_data adds
/// exact-solution measurements for the inverse loss term.
CollocationSet build_collocation(const PDEProblem& pb, const SolveConfig& cfg,
                                 bool with_data);

/// Jet layout used by the residual assembly for a given problem and degree.
JetLayout residual_layout(const PDEProblem& pb, int p);

/// Trial-solution value u~(x, t) = t f + I.
double trial_value(const TrialSolution& trial, std::span<const double> x,
                   double t);

/// PDE residual at (x, t_n) from a caller-supplied jet ladder (time node ->
/// jet in the residual layout). Used both by the trial path and by tests
/// that substitute analytic jets.
using JetProvider = std::function<Jet<double>(std::span<const double>, int)>;
double residual_with_jets(const PDEProblem& pb, int p, const TimeGrid& grid,
                          std::span<const double> x, int n,
                          const JetProvider& jets);

/// Residual of the trial solution at (x, t_n).
double residual_at(const PDEProblem& pb, const TrialSolution& trial, int p,
                   const TimeGrid& grid, std::span<const double> x, int n);

/// Three-term loss: mean squared boundary mismatch + mean squared residual
/// (+ mean squared data misfit when inverse values are supplied).
/// `coeffs` optionally overrides (alpha, beta, gamma) for the residual, which
/// is how finite-difference checks over alpha rebuild the stencil weights.
struct CoeffOverride {
  double alpha, beta, gamma;
};
double total_loss(const PDEProblem& pb, const TrialSolution& trial, int p,
                  const CollocationSet& colloc,
                  const CoeffOverride* coeffs = nullptr);

/// Loss with exact gradients over network parameters and the PDE
/// coefficients (alpha through the stencil weights, beta, gamma). The alpha
/// derivative is the closed-form path through powers and Gamma that the
/// inverse solver optimizes.
struct InverseLossGrad {
  double value = 0.0;
  std::vector<double> param_grad;
  double d_alpha = 0.0, d_beta = 0.0, d_gamma = 0.0;
};
InverseLossGrad total_loss_gradient(const PDEProblem& pb,
                                    const TrialSolution& trial, int p,
                                    const CollocationSet& colloc, double alpha,
                                    double beta, double gamma);

std::pair<TrialSolution, SolveReport> solve_forward(const PDEProblem& pb,
                                                    const SolveConfig& cfg);

std::pair<TrialSolution, SolveReport> solve_inverse(const PDEProblem& pb,
                                                    const InverseConfig& inv,
                                                    const SolveConfig& cfg);

/// Relative L2 error of the trained trial on the problem's test set.
double test_rel_l2(const PDEProblem& pb, const TrialSolution& trial,
                   int test_points);

/// Population of threads honoring HNS_THREADS.
int resolve_threads(int requested);

} // namespace hns
