#include "hns/stencil.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hns/special.hpp"

namespace hns {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Sum of w[d] * data with Neumaier compensation.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

} // namespace

double moment_integral(int j, int lag, FracOrder alpha) {
  if (j < 0 || j > 4) throw std::invalid_argument("moment_integral: j in 0..4");
  if (lag < 0) throw std::invalid_argument("moment_integral: lag >= 0");
  const double a = alpha.alpha;
  const double b = lag + 1.0;
  if (j == 0) {
    // a_l / (1 - alpha) with a_l = (l+1)^(1-a) - l^(1-a), the L1 coefficient.
    return (std::pow(b, 1.0 - a) - std::pow(static_cast<double>(lag), 1.0 - a)) /
           (1.0 - a);
  }
  if (lag == 0) {
    // Exact alternating binomial form; at most five well-conditioned terms.
    double s = 0.0;
    for (int m = 0; m <= j; ++m) {
      const double term = binomial(j, m) / (m + 1.0 - a);
      s += (m % 2 == 0) ? term : -term;
    }
    return s;
  }
  // mu_j = b^(-a) * sum_m (a)_m / (m! b^m (j + m + 1)); every term is
  // positive, ratio < 1/b <= 1/2, so the series is cancellation-free.
  double term = 1.0 / (j + 1.0);
  double sum = term;
  for (int m = 1; m < 400; ++m) {
    term *= (a + m - 1.0) / (m * b) * (j + m) / (j + m + 1.0);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return std::pow(b, -a) * sum;
}

KernelTable::KernelTable(int p, FracOrder alpha)
    : p_(p), alpha_(alpha.alpha), basis_(hermite_basis(p)) {
  dbasis_.reserve(basis_.fns.size());
  for (const auto& fn : basis_.fns) dbasis_.push_back(fn.poly.derivative());
}

void KernelTable::reserve(int max_lag) {
  while (static_cast<int>(kernels_.size()) <= max_lag) {
    const int l = static_cast<int>(kernels_.size());
    LagKernel lk;
    for (std::size_t i = 0; i < basis_.fns.size(); ++i) {
      const auto& fn = basis_.fns[i];
      const auto& dc = dbasis_[i].coef;
      double k = 0.0;
      for (std::size_t j = 0; j < dc.size(); ++j) {
        if (dc[j] != 0.0) {
          k += dc[j] * moment_integral(static_cast<int>(j), l, FracOrder(alpha_));
        }
      }
      lk.k[static_cast<std::size_t>(fn.deriv)][fn.right ? 1 : 0] = k;
    }
    kernels_.push_back(lk);
  }
}

const LagKernel& KernelTable::lag(int l) {
  if (l < 0) throw std::invalid_argument("KernelTable::lag: l >= 0");
  if (l >= static_cast<int>(kernels_.size())) reserve(l);
  return kernels_[static_cast<std::size_t>(l)];
}

HermiteStencil build_stencil(int p, FracOrder alpha, int n, double dt) {
  if (n < 0) throw std::invalid_argument("build_stencil: n >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("build_stencil: dt > 0");
  KernelTable table(p, alpha);
  table.reserve(n > 0 ? n - 1 : 0);

  HermiteStencil st;
  st.p = p;
  st.alpha = alpha.alpha;
  st.n = n;
  st.dt = dt;
  st.weights.resize(static_cast<std::size_t>(n));

  const double inv_gamma = 1.0 / gamma_fn(1.0 - alpha.alpha);
  const int dmax = (p - 1) / 2;
  for (int l = 0; l < n; ++l) {
    const LagKernel& lk = table.lag(l);
    auto& w = st.weights[static_cast<std::size_t>(l)];
    for (int d = 0; d <= dmax; ++d) {
      const double scale = std::pow(dt, d - alpha.alpha) * inv_gamma;
      w.left[static_cast<std::size_t>(d)] = scale * lk.k[static_cast<std::size_t>(d)][0];
      w.right[static_cast<std::size_t>(d)] = scale * lk.k[static_cast<std::size_t>(d)][1];
    }
  }
  return st;
}

double apply_stencil(const HermiteStencil& st, const ScalarField1D& field) {
  field.check_lengths();
  const int dmax = st.max_deriv();
  for (int d = 0; d <= dmax; ++d) {
    if (!field.has_order(d)) {
      throw std::invalid_argument(
          "apply_stencil: field is missing derivative order " +
          std::to_string(d) + " required by p = " + std::to_string(st.p));
    }
  }
  if (static_cast<int>(field.values.size()) < st.n + 1) {
    throw std::invalid_argument("apply_stencil: field shorter than n + 1 nodes");
  }
  CompensatedSum acc;
  for (int l = 0; l < st.n; ++l) {
    const auto& w = st.weights[static_cast<std::size_t>(l)];
    const std::size_t left = static_cast<std::size_t>(st.n - 1 - l);
    const std::size_t right = static_cast<std::size_t>(st.n - l);
    for (int d = 0; d <= dmax; ++d) {
      const auto& data = field.order(d);
      acc.add(w.left[static_cast<std::size_t>(d)] * data[left]);
      acc.add(w.right[static_cast<std::size_t>(d)] * data[right]);
    }
  }
  return acc.value();
}

double error_bound(int p, FracOrder alpha, double dt, double max_deriv) {
  const double a = alpha.alpha;
  const double half_arg = 0.5 * (1.0 - 2.0 * a + p);
  if (half_arg <= 0.0) {
    throw std::domain_error("error_bound: Gamma argument pole");
  }
  double fact = 1.0;
  for (int i = 2; i <= p + 1; ++i) fact *= i;
  const double bracket =
      std::pow(0.5, p + 1) +
      a * std::exp(log_gamma(0.5 * (3.0 + p)) + log_gamma(half_arg) -
                   log_gamma(2.0 - a + p));
  return bracket / (fact * gamma_fn(1.0 - a)) * max_deriv *
         std::pow(dt, p + 1.0 - a);
}

double estimate_order(std::span<const double> dts,
                      std::span<const double> errors) {
  if (dts.size() != errors.size() || dts.size() < 3) {
    throw std::invalid_argument("estimate_order: need >= 3 matching points");
  }
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(errors[i] > 0.0)) {
      throw std::domain_error("estimate_order: errors must be positive");
    }
    if (i > 0 && !(dts[i] < dts[i - 1])) {
      throw std::invalid_argument("estimate_order: dts must strictly decrease");
    }
  }
  const std::size_t m = dts.size();
  double xbar = 0.0, ybar = 0.0;
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = std::log(dts[i]);
    y[i] = std::log(errors[i]);
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= m;
  ybar /= m;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    num += (x[i] - xbar) * (y[i] - ybar);
    den += (x[i] - xbar) * (x[i] - xbar);
  }
  if (den <= 0.0) throw std::domain_error("estimate_order: degenerate fit");
  return num / den;
}

std::vector<KernelRow> kernel_dump(int p, FracOrder alpha, int n) {
  KernelTable table(p, alpha);
  std::vector<KernelRow> rows;
  const int dmax = (p - 1) / 2;
  for (int l = 0; l <= n; ++l) {
    for (int d = 0; d <= dmax; ++d) {
      double k = 0.0;
      if (l < n) k += table.lag(l).k[static_cast<std::size_t>(d)][1];
      if (l >= 1) k += table.lag(l - 1).k[static_cast<std::size_t>(d)][0];
      rows.push_back({p, alpha.alpha, l, d, k});
    }
  }
  return rows;
}

} // namespace hns
