#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hns {

struct LbfgsConfig {
  int history = 50;
  int max_iters = 3000;
  double grad_tol = 1e-10;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 25;
};

enum class LbfgsStatus {
  converged,       // gradient norm below tolerance
  max_iterations,
  line_search_failed, // best iterate returned
  aborted_nonfinite,  // objective produced NaN/Inf
};

struct TracePoint {
  int iter;
  double loss;
  double grad_norm;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  LbfgsStatus status = LbfgsStatus::converged;
  std::vector<TracePoint> trace; // one entry per accepted iteration
  int discarded_pairs = 0;       // curvature pairs dropped by the safeguard
};

/// Objective callback: writes the gradient, returns the value.
using Objective =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

/// L-BFGS with a strong-Wolfe line search. Deterministic: identical inputs
/// produce identical iterate sequences. Accepted steps never increase the
/// objective; the trace records each accepted iteration.
MinimizeResult minimize(const Objective& objective,
                        std::span<const double> x0, const LbfgsConfig& config);

} // namespace hns
