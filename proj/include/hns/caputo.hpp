#pragma once

#include <functional>
#include <span>
#include <stdexcept>

#include "hns/grid.hpp"

namespace hns {

/// Thrown when the adaptive quadrature cannot reach the requested tolerance
/// within its subdivision budget. Carries the best estimate obtained.
struct OracleError : std::runtime_error {
  double estimate;
  double achieved_tol;
  OracleError(const char* msg, double est, double tol)
      : std::runtime_error(msg), estimate(est), achieved_tol(tol) {}
};

/// Analytic Caputo derivative of t^q for order alpha in (0,1):
///   D^a t^q = Gamma(q+1)/Gamma(q+1-a) * t^(q-a),  q > 0;  D^a const = 0.
double caputo_monomial(double q, FracOrder alpha, double t);

/// Brute-force reference: adaptive Gauss-Kronrod quadrature of
///   (1/Gamma(1-a)) \int_0^t u'(s) (t-s)^(-a) ds
/// after the substitution s = (t - tau)^(1-a), which removes the endpoint
/// singularity exactly. Absolute error <= tol on smooth integrands.
double caputo_oracle(const std::function<double(double)>& uprime,
                     FracOrder alpha, double t, double tol);

/// ||predicted - exact||_2 / ||exact||_2.
double relative_l2(std::span<const double> predicted,
                   std::span<const double> exact);

} // namespace hns
