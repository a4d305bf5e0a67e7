#include "hns/caputo.hpp"

#include <cmath>

#include "hns/special.hpp"

namespace hns {

namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (positive half).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct GkResult {
  double integral;
  double error;
};

template <class F>
GkResult gauss_kronrod_15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  for (int i = 0; i < 7; ++i) {
    const double x = h * kXgk[i];
    const double fsum = f(c - x) + f(c + x);
    res_k += kWgk[i] * fsum;
    if (i % 2 == 1) res_g += kWg[i / 2] * fsum;
  }
  res_k *= h;
  res_g *= h;
  return {res_k, std::abs(res_k - res_g)};
}

template <class F>
double adaptive_quad(const F& f, double a, double b, double tol,
                     int max_intervals) {
  struct Seg {
    double a, b, integral, error;
  };
  std::vector<Seg> segs;
  auto first = gauss_kronrod_15(f, a, b);
  segs.push_back({a, b, first.integral, first.error});
  int used = 1;
  while (true) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total += segs[i].integral;
      err += segs[i].error;
      if (segs[i].error > segs[worst].error) worst = i;
    }
    if (err <= tol) return total;
    if (used >= max_intervals) {
      throw OracleError("caputo_oracle: quadrature budget exhausted", total,
                        err);
    }
    const Seg s = segs[worst];
    const double mid = 0.5 * (s.a + s.b);
    auto left = gauss_kronrod_15(f, s.a, mid);
    auto right = gauss_kronrod_15(f, mid, s.b);
    segs[worst] = {s.a, mid, left.integral, left.error};
    segs.push_back({mid, s.b, right.integral, right.error});
    ++used;
  }
}

} // namespace

double caputo_monomial(double q, FracOrder alpha, double t) {
  if (t < 0.0) throw std::domain_error("caputo_monomial: t must be >= 0");
  if (q < 0.0) throw std::domain_error("caputo_monomial: q must be >= 0");
  if (q == 0.0) return 0.0;
  const double a = alpha.alpha;
  const double ratio = std::exp(log_gamma(q + 1.0) - log_gamma(q + 1.0 - a));
  return ratio * std::pow(t, q - a);
}

double caputo_oracle(const std::function<double(double)>& uprime,
                     FracOrder alpha, double t, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("caputo_oracle: tol > 0");
  if (t < 0.0) throw std::domain_error("caputo_oracle: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double a = alpha.alpha;
  // Substitute s = (t - tau)^(1-a):
  //   \int_0^t u'(tau) (t-tau)^(-a) dtau
  //     = 1/(1-a) \int_0^{t^(1-a)} u'(t - s^(1/(1-a))) ds.
  const double expo = 1.0 / (1.0 - a);
  const double upper = std::pow(t, 1.0 - a);
  auto g = [&](double s) {
    double tau = t - std::pow(s, expo);
    if (tau < 0.0) tau = 0.0;
    if (tau > t) tau = t;
    return uprime(tau);
  };
  const double prefactor = 1.0 / ((1.0 - a) * gamma_fn(1.0 - a));
  const double integral =
      adaptive_quad(g, 0.0, upper, tol / std::max(prefactor, 1.0), 20000);
  return prefactor * integral;
}

double relative_l2(std::span<const double> predicted,
                   std::span<const double> exact) {
  if (predicted.size() != exact.size()) {
    throw std::invalid_argument("relative_l2: length mismatch");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double d = predicted[i] - exact[i];
    num += d * d;
    den += exact[i] * exact[i];
  }
  if (den == 0.0) {
    throw std::domain_error("relative_l2: exact vector has zero norm");
  }
  return std::sqrt(num / den);
}

} // namespace hns
