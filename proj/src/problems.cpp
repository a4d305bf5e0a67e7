#include "hns/problems.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "hns/caputo.hpp"
#include "hns/special.hpp"

namespace hns {

namespace {

double sum_cos(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::cos(v);
  return s;
}

double sum_sin(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::sin(v);
  return s;
}

PDEProblem make_fde(double a) {
  PDEProblem pb;
  pb.id = "fde";
  pb.dim = 0;
  pb.alpha = a;
  pb.t_final = 2.0;
  pb.rho = 1.0;
  const double c = gamma_fn(3.0) / gamma_fn(3.0 - a);
  pb.forcing = [c, a](std::span<const double>, double t) {
    return c * std::pow(t, 2.0 - a) - t * t - 1.0;
  };
  pb.initial = [](std::span<const double>) {
    InitialData d;
    d.value = 1.0;
    return d;
  };
  pb.exact = [](std::span<const double>, double t) { return 1.0 + t * t; };
  pb.exact_jets = [](std::span<const double>, double t) {
    ExactJets j;
    j.value = 1.0 + t * t;
    j.dt = 2.0 * t;
    j.dtt = 2.0;
    return j;
  };
  pb.exact_caputo = [c, a](std::span<const double>, double t) {
    return t > 0.0 ? c * std::pow(t, 2.0 - a) : 0.0;
  };
  return pb;
}

PDEProblem make_tfde(double a) {
  PDEProblem pb;
  pb.id = "tfde";
  pb.dim = 1;
  pb.alpha = a;
  pb.beta = 1.0;
  const double c = 2.0 / gamma_fn(1.0 + a);
  pb.forcing = [](std::span<const double>, double) { return 0.0; };
  pb.has_boundary = true;
  pb.boundary = [c, a](std::span<const double> x, double t) {
    return x[0] * x[0] + c * std::pow(t, a);
  };
  pb.initial = [](std::span<const double> x) {
    InitialData d;
    d.value = x[0] * x[0];
    d.d1[0] = 2.0 * x[0];
    d.d2[0] = 2.0;
    return d;
  };
  pb.exact = [c, a](std::span<const double> x, double t) {
    return x[0] * x[0] + c * std::pow(t, a);
  };
  pb.exact_jets = [c, a](std::span<const double> x, double t) {
    ExactJets j;
    j.value = x[0] * x[0] + c * std::pow(t, a);
    j.dt = c * a * std::pow(t, a - 1.0);
    j.dtt = c * a * (a - 1.0) * std::pow(t, a - 2.0);
    j.d1[0] = 2.0 * x[0];
    j.d2[0] = 2.0;
    return j;
  };
  pb.exact_caputo = [](std::span<const double>, double t) {
    return t > 0.0 ? 2.0 : 0.0;
  };
  return pb;
}

PDEProblem make_tfade2d(double a) {
  PDEProblem pb;
  pb.id = "tfade2d";
  pb.dim = 2;
  pb.alpha = a;
  pb.beta = 1.0;
  const double c = 2.0 / gamma_fn(3.0 - a);
  pb.forcing = [c, a](std::span<const double> x, double t) {
    return (c * std::pow(t, 2.0 - a) - 2.0 * t * t) * std::exp(x[0] + x[1]);
  };
  pb.has_boundary = true;
  pb.boundary = [](std::span<const double> x, double t) {
    return t * t * std::exp(x[0] + x[1]);
  };
  pb.exact = pb.boundary;
  pb.exact_jets = [](std::span<const double> x, double t) {
    ExactJets j;
    const double e = std::exp(x[0] + x[1]);
    j.value = t * t * e;
    j.dt = 2.0 * t * e;
    j.dtt = 2.0 * e;
    for (int i = 0; i < 2; ++i) {
      j.d1[i] = t * t * e;
      j.d2[i] = t * t * e;
    }
    return j;
  };
  pb.exact_caputo = [c, a](std::span<const double> x, double t) {
    return c * std::pow(t, 2.0 - a) * std::exp(x[0] + x[1]);
  };
  return pb;
}

PDEProblem make_fpde3d(double a) {
  PDEProblem pb;
  pb.id = "fpde3d";
  pb.dim = 3;
  pb.alpha = a;
  pb.beta = 1.0;
  pb.gamma = 1.0;
  const double c = 2.0 / gamma_fn(3.0 - a);
  pb.forcing = [c, a](std::span<const double> x, double t) {
    return c * std::pow(t, 2.0 - a) + sum_cos(x) - sum_sin(x);
  };
  pb.has_boundary = true;
  pb.boundary = [](std::span<const double> x, double t) {
    return t * t + sum_cos(x);
  };
  pb.exact = pb.boundary;
  pb.initial = [](std::span<const double> x) {
    InitialData d;
    d.value = sum_cos(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      d.d1[i] = -std::sin(x[i]);
      d.d2[i] = -std::cos(x[i]);
    }
    return d;
  };
  pb.exact_jets = [](std::span<const double> x, double t) {
    ExactJets j;
    j.value = t * t + sum_cos(x);
    j.dt = 2.0 * t;
    j.dtt = 2.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      j.d1[i] = -std::sin(x[i]);
      j.d2[i] = -std::cos(x[i]);
    }
    return j;
  };
  pb.exact_caputo = [c, a](std::span<const double>, double t) {
    return t > 0.0 ? c * std::pow(t, 2.0 - a) : 0.0;
  };
  return pb;
}

// Shared structure of the t^2 sum-of-cosines solutions: the 10D advection
// benchmark and the 3D advection-diffusion inverse benchmark.
PDEProblem make_t2cos(const std::string& id, int dim, double a, double beta,
                      double gamma) {
  PDEProblem pb;
  pb.id = id;
  pb.dim = dim;
  pb.alpha = a;
  pb.beta = beta;
  pb.gamma = gamma;
  const double c = 2.0 / gamma_fn(3.0 - a);
  pb.forcing = [c, a, beta, gamma](std::span<const double> x, double t) {
    return c * std::pow(t, 2.0 - a) * sum_cos(x) +
           beta * t * t * sum_cos(x) - gamma * t * t * sum_sin(x);
  };
  pb.has_boundary = true;
  pb.boundary = [](std::span<const double> x, double t) {
    return t * t * sum_cos(x);
  };
  pb.exact = pb.boundary;
  pb.exact_jets = [](std::span<const double> x, double t) {
    ExactJets j;
    j.value = t * t * sum_cos(x);
    j.dt = 2.0 * t * sum_cos(x);
    j.dtt = 2.0 * sum_cos(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      j.d1[i] = -t * t * std::sin(x[i]);
      j.d2[i] = -t * t * std::cos(x[i]);
    }
    return j;
  };
  pb.exact_caputo = [c, a](std::span<const double> x, double t) {
    return t > 0.0 ? c * std::pow(t, 2.0 - a) * sum_cos(x) : 0.0;
  };
  return pb;
}

} // namespace

std::vector<std::string> builtin_problem_ids() {
  return {"fde", "tfde", "tfade2d", "fpde3d", "adv10d", "inv3d"};
}

double exact_residual_check(const PDEProblem& pb, int npoints,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u01 = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  double worst = 0.0;
  for (int i = 0; i < npoints; ++i) {
    std::vector<double> x(static_cast<std::size_t>(pb.dim));
    for (auto& v : x) v = u01();
    const double t = 0.05 + 0.95 * u01() * pb.t_final;
    const ExactJets j = pb.exact_jets(x, t);
    double lap = 0.0, adv = 0.0;
    for (int d = 0; d < pb.dim; ++d) {
      lap += j.d2[static_cast<std::size_t>(d)];
      adv += j.d1[static_cast<std::size_t>(d)];
    }
    const double r = pb.exact_caputo(x, t) - pb.beta * lap + pb.gamma * adv -
                     pb.rho * j.value - pb.forcing(x, t);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

PDEProblem make_problem(const std::string& id, double alpha) {
  PDEProblem pb;
  if (id == "fde") {
    pb = make_fde(alpha > 0.0 ? alpha : 0.5);
  } else if (id == "tfde") {
    pb = make_tfde(alpha > 0.0 ? alpha : 0.65);
  } else if (id == "tfade2d") {
    pb = make_tfade2d(alpha > 0.0 ? alpha : 0.85);
  } else if (id == "fpde3d") {
    pb = make_fpde3d(alpha > 0.0 ? alpha : 0.5);
  } else if (id == "adv10d") {
    pb = make_t2cos("adv10d", 10, alpha > 0.0 ? alpha : 0.5, 0.0, 1.0);
  } else if (id == "inv3d") {
    pb = make_t2cos("inv3d", 3, alpha > 0.0 ? alpha : 0.5, 1.0, 1.0);
  } else {
    throw std::invalid_argument("make_problem: unknown problem id '" + id + "'");
  }
  const double resid = exact_residual_check(pb, 5, 1234);
  if (resid > 1e-9) {
    throw std::logic_error("make_problem: exact solution fails the residual "
                           "spot check for " + id);
  }
  return pb;
}

} // namespace hns
