#include "hns/fdm.hpp"

#include <cmath>
#include <stdexcept>

#include "hns/caputo.hpp"
#include "hns/special.hpp"

namespace hns {

ScalarField1D solve_fde_l1(const FdeInstance& inst) {
  const double a = inst.alpha.alpha;
  const int N = inst.grid.steps;
  const double dt = inst.grid.dt;
  const double c = std::pow(dt, -a) / gamma_fn(2.0 - a);

  // L1 coefficients a_l = (l+1)^(1-a) - l^(1-a).
  std::vector<double> al(static_cast<std::size_t>(N));
  for (int l = 0; l < N; ++l) {
    al[static_cast<std::size_t>(l)] =
        std::pow(l + 1.0, 1.0 - a) - std::pow(static_cast<double>(l), 1.0 - a);
  }

  ScalarField1D u;
  u.values.assign(static_cast<std::size_t>(N) + 1, 0.0);
  u.values[0] = inst.u0;
  for (int n = 1; n <= N; ++n) {
    const double tn = inst.grid.nodes[static_cast<std::size_t>(n)];
    double hist = al[static_cast<std::size_t>(n - 1)] * inst.u0;
    for (int k = 1; k <= n - 1; ++k) {
      hist += (al[static_cast<std::size_t>(n - k - 1)] -
               al[static_cast<std::size_t>(n - k)]) *
              u.values[static_cast<std::size_t>(k)];
    }
    const double an = inst.a(tn);
    const double denom = c - an; // c * a_0 with a_0 = 1
    if (denom == 0.0 || !std::isfinite(denom)) {
      throw std::runtime_error("solve_fde_l1: singular step coefficient at n=" +
                               std::to_string(n));
    }
    u.values[static_cast<std::size_t>(n)] = (inst.b(tn) + c * hist) / denom;
  }
  return u;
}

FdeInstance make_benchmark_fde(double alpha, int mt, double T) {
  const double coef = gamma_fn(3.0) / gamma_fn(3.0 - alpha);
  return FdeInstance{
      FracOrder(alpha),
      [](double) { return 1.0; },
      [coef, alpha](double t) {
        return coef * std::pow(t, 2.0 - alpha) - t * t - 1.0;
      },
      1.0,
      TimeGrid(T, mt - 1),
  };
}

double fdm_benchmark_error(double alpha, int mt, double T) {
  const FdeInstance inst = make_benchmark_fde(alpha, mt, T);
  const ScalarField1D u = solve_fde_l1(inst);
  std::vector<double> exact(u.values.size());
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const double t = inst.grid.nodes[k];
    exact[k] = 1.0 + t * t;
  }
  return relative_l2(u.values, exact);
}

} // namespace hns
