#pragma once

#include <array>
#include <vector>

namespace hns {

/// Dense polynomial in the local interval variable tau in [0,1],
/// coefficients in increasing degree order.
struct Poly {
  std::vector<double> coef;

  double eval(double tau) const {
    double acc = 0.0;
    for (std::size_t i = coef.size(); i-- > 0;) acc = acc * tau + coef[i];
    return acc;
  }

  Poly derivative() const {
    Poly d;
    if (coef.size() <= 1) {
      d.coef = {0.0};
      return d;
    }
    d.coef.resize(coef.size() - 1);
    for (std::size_t i = 1; i < coef.size(); ++i) {
      d.coef[i - 1] = coef[i] * static_cast<double>(i);
    }
    return d;
  }
};

/// One two-point Hermite basis function on [0,1]: matches derivative order
/// `deriv` at the endpoint `right ? 1 : 0` and annihilates every other
/// matching condition of the degree-p family.
struct HermiteBasisFn {
  int deriv;  // 0 = value, 1 = first derivative, 2 = second derivative
  bool right; // false: left endpoint, true: right endpoint
  Poly poly;
};

/// The degree-p two-point Hermite basis (p in {1, 3, 5}) in the local
/// variable tau in [0,1]. Interpolating on [a, a + dt] uses
///   H(a + tau dt) = sum_i basis[i](tau) * dt^deriv_i * f^(deriv_i)(node_i).
struct HermiteBasis {
  int p;
  std::vector<HermiteBasisFn> fns; // 2, 4, or 6 entries

  int max_deriv() const { return (p - 1) / 2; }
};

/// Exact rational-coefficient basis for p in {1, 3, 5}; throws otherwise.
HermiteBasis hermite_basis(int p);

} // namespace hns
