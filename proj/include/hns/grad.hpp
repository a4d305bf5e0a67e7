#pragma once

#include <functional>

#include "hns/net.hpp"
#include "hns/tape.hpp"
#include "hns/trial.hpp"

namespace hns {

/// Loss value with exact gradients over network parameters and registered
/// extra scalars.
struct LossGradResult {
  double value = 0.0;
  std::vector<double> param_grad;
  std::vector<double> extra_grad;
};

/// Evaluation context handed to loss builders: network parameters and the
/// extra scalars already live on the tape as leaves.
class JetContext {
 public:
  JetContext(Tape& tape, const DenseNet& net, std::span<const double> extras);

  Tape& tape() { return tape_; }
  std::span<const Var> params() const { return param_vars_; }
  std::span<const Var> extras() const { return extra_vars_; }

  /// Network jet at `input` with the tracked coordinates of `layout`.
  Jet<Var> eval(std::span<const double> input, const JetLayout& layout);

  /// Trial-solution jet u~ = t f + I at (x, t).
  Jet<Var> trial(const TrialSolution& trial, std::span<const double> x,
                 double t, const JetLayout& layout);

 private:
  Tape& tape_;
  const DenseNet& net_;
  std::vector<Var> param_vars_;
  std::vector<Var> extra_vars_;
};

using LossBuilder = std::function<Var(JetContext&)>;

/// Evaluate a scalar loss assembled from jets and tape algebra, then run the
/// backward sweep. The gradient matches central finite differences to the
/// accuracy of the objective itself.
LossGradResult loss_gradient(const DenseNet& net, const LossBuilder& build,
                             std::span<const double> extras = {});

} // namespace hns
