#pragma once

#include <cmath>

namespace hns {

// GELU in the exact error-function form: gelu(x) = x Phi(x) with Phi the
// standard normal CDF. The tanh approximation is avoided because its second
// derivative deviates measurably.

inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

inline double norm_pdf(double x) {
  return 0.39894228040143267794 * std::exp(-0.5 * x * x);
}

inline double gelu_value(double x) { return x * norm_cdf(x); }

inline double gelu_d1(double x) { return norm_cdf(x) + x * norm_pdf(x); }

inline double gelu_d2(double x) { return (2.0 - x * x) * norm_pdf(x); }

inline double gelu_d3(double x) { return x * (x * x - 4.0) * norm_pdf(x); }

} // namespace hns
