#include "hns/special.hpp"

#include <cmath>
#include <stdexcept>

namespace hns {

namespace {

// Lanczos g = 7, n = 9 (Godfrey coefficients).
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

constexpr double kPi = 3.141592653589793238462643383279502884;

bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::floor(x);
}

// Lanczos sum for x >= 0.5.
double lanczos_sum(double x) {
  double s = kLanczos[0];
  for (int i = 1; i < 9; ++i) s += kLanczos[i] / (x + i - 1.0);
  return s;
}

} // namespace

double gamma_fn(double x) {
  if (is_nonpositive_integer(x)) {
    throw std::domain_error("gamma_fn: pole at non-positive integer");
  }
  if (x < 0.5) {
    // Reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x)).
    return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
  }
  const double z = x - 1.0;
  const double base = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(base, z + 0.5) * std::exp(-base) *
         lanczos_sum(x);
}

double log_gamma(double x) {
  if (x <= 0.0) {
    throw std::domain_error("log_gamma: requires x > 0");
  }
  if (x < 0.5) {
    // log Gamma(x) = log Gamma(x+1) - log x.
    return log_gamma(x + 1.0) - std::log(x);
  }
  const double z = x - 1.0;
  const double base = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(base) - base +
         std::log(lanczos_sum(x));
}

double digamma(double x) {
  if (is_nonpositive_integer(x)) {
    throw std::domain_error("digamma: pole at non-positive integer");
  }
  if (x < 0.0) {
    // Reflection: psi(x) = psi(1 - x) - pi cot(pi x).
    return digamma(1.0 - x) - kPi / std::tan(kPi * x);
  }
  double acc = 0.0;
  // psi(x) = psi(x + 1) - 1/x until the asymptotic series is accurate.
  while (x < 12.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Asymptotic expansion with Bernoulli-number coefficients.
  double series = std::log(x) - 0.5 * inv;
  series -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 -
            inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 -
            inv2 * (691.0 / 32760.0))))));
  return acc + series;
}

} // namespace hns
