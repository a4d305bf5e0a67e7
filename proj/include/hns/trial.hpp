#pragma once

#include <functional>

#include "hns/net.hpp"

namespace hns {

/// Value and pure spatial derivatives of the initial condition at a point,
/// indexed by spatial coordinate.
struct InitialData {
  double value = 0.0;
  std::array<double, kMaxCoords> d1{};
  std::array<double, kMaxCoords> d2{};
};

using InitialFn = std::function<InitialData(std::span<const double>)>;

/// Hard-constrained trial solution u~(x, t) = t f(x, t; theta) + I(x).
/// The multiplicative t factor makes the initial condition exact for every
/// parameter state.
struct TrialSolution {
  DenseNet net;
  InitialFn initial; // may be empty for I == 0
};

/// Compose the trial solution in jet arithmetic: the t prefactor enters as
/// the jet (t, dt = 1) so product-rule bookkeeping is automatic. The time
/// coordinate is the last network input (index = spatial dim).
template <class Ops, class S = typename Ops::Scalar>
Jet<S> trial_forward_jets(Ops& ops, const JetLayout& L,
                          std::span<const int> sizes, std::span<const S> params,
                          std::span<const double> x, double t,
                          const InitialData* init) {
  const int dim = sizes.front() - 1;
  std::vector<double> input(x.begin(), x.end());
  input.push_back(t);
  Jet<S> f = net_forward_jets(ops, L, sizes, params, input);

  Jet<S> tj;
  tj.c[0] = ops.constant(t);
  for (int s = 0; s < L.ncoords; ++s) {
    tj.c[L.d1pos[s]] = ops.constant(L.coord[s] == dim ? 1.0 : 0.0);
    if (L.d2pos[s] >= 0) tj.c[L.d2pos[s]] = ops.constant(0.0);
  }
  Jet<S> u = jet_mul(ops, L, tj, f);

  if (init != nullptr) {
    for (int s = 0; s < L.ncoords; ++s) {
      const int cd = L.coord[s];
      if (cd < dim) {
        if (init->d1[cd] != 0.0) {
          u.c[L.d1pos[s]] = ops.add_c(u.c[L.d1pos[s]], init->d1[cd]);
        }
        if (L.d2pos[s] >= 0 && init->d2[cd] != 0.0) {
          u.c[L.d2pos[s]] = ops.add_c(u.c[L.d2pos[s]], init->d2[cd]);
        }
      }
    }
    if (init->value != 0.0) u.c[0] = ops.add_c(u.c[0], init->value);
  }
  return u;
}

/// Public double-precision trial jet with the JetValue surface.
JetValue trial_jet(const TrialSolution& trial, std::span<const double> x,
                   double t, std::span<const int> coords, int order);

} // namespace hns
