#include "hns/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace hns {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

bool finite(double v) { return std::isfinite(v); }

struct Pair {
  std::vector<double> s, y;
  double rho;
};

// Cubic minimizer of the interpolant through (a, fa, da) and (b, fb, db),
// safeguarded to the interior of [a, b].
double cubic_min(double a, double fa, double da, double b, double fb,
                 double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (disc < 0.0) return 0.5 * (a + b);
  const double d2 = std::sqrt(disc) * (b > a ? 1.0 : -1.0);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) return 0.5 * (a + b);
  double m = b - (b - a) * (db + d2 - d1) / denom;
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double margin = 0.1 * (hi - lo);
  if (!(m > lo + margin && m < hi - margin)) m = 0.5 * (a + b);
  return m;
}

} // namespace

MinimizeResult minimize(const Objective& objective,
                        std::span<const double> x0, const LbfgsConfig& cfg) {
  if (!(cfg.wolfe_c1 > 0.0 && cfg.wolfe_c1 < cfg.wolfe_c2 && cfg.wolfe_c2 < 1.0)) {
    throw std::invalid_argument("LbfgsConfig: need 0 < c1 < c2 < 1");
  }
  if (cfg.history < 1) throw std::invalid_argument("LbfgsConfig: history >= 1");

  const std::size_t n = x0.size();
  MinimizeResult res;
  res.x.assign(x0.begin(), x0.end());

  std::vector<double> g(n), x_trial(n), g_trial(n), d(n);
  double f = objective(res.x, g);
  int evals = 1;
  if (!finite(f) || !std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); })) {
    res.status = LbfgsStatus::aborted_nonfinite;
    res.value = f;
    return res;
  }
  res.value = f;
  if (norm(g) <= cfg.grad_tol) {
    res.status = LbfgsStatus::converged;
    return res;
  }

  std::deque<Pair> mem;
  std::vector<double> alpha_buf;

  const double c1 = cfg.wolfe_c1, c2 = cfg.wolfe_c2;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    // Two-loop recursion for d = -H g.
    d.assign(g.begin(), g.end());
    alpha_buf.assign(mem.size(), 0.0);
    for (std::size_t i = mem.size(); i-- > 0;) {
      const Pair& p = mem[i];
      const double a = p.rho * dot(p.s, d);
      alpha_buf[i] = a;
      for (std::size_t k = 0; k < n; ++k) d[k] -= a * p.y[k];
    }
    if (!mem.empty()) {
      const Pair& last = mem.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (auto& v : d) v *= gamma;
    }
    for (std::size_t i = 0; i < mem.size(); ++i) {
      const Pair& p = mem[i];
      const double b = p.rho * dot(p.y, d);
      for (std::size_t k = 0; k < n; ++k) d[k] += (alpha_buf[i] - b) * p.s[k];
    }
    for (auto& v : d) v = -v;

    double dphi0 = dot(g, d);
    if (dphi0 >= 0.0) {
      // Not a descent direction: drop the memory and steepest-descend.
      mem.clear();
      for (std::size_t k = 0; k < n; ++k) d[k] = -g[k];
      dphi0 = dot(g, d);
    }

    const double phi0 = f;
    auto phi = [&](double a, double& dphi) {
      for (std::size_t k = 0; k < n; ++k) x_trial[k] = res.x[k] + a * d[k];
      const double v = objective(x_trial, g_trial);
      ++evals;
      dphi = dot(g_trial, d);
      return v;
    };

    // Strong Wolfe line search: bracket then zoom with cubic interpolation.
    double alpha = (iter == 1) ? std::min(1.0, 1.0 / norm(g)) : 1.0;
    double a_prev = 0.0, f_prev = phi0, d_prev = dphi0;
    double a_lo = -1.0, f_lo = 0.0, d_lo = 0.0;
    double a_hi = -1.0, f_hi = 0.0, d_hi = 0.0;
    bool bracketed = false, accepted = false, nonfinite = false;
    double f_acc = 0.0, d_acc = 0.0, a_acc = 0.0;
    int ls = 0;
    while (ls < cfg.max_line_search) {
      ++ls;
      double dv = 0.0;
      const double fv = phi(alpha, dv);
      if (!finite(fv) || !finite(dv)) {
        // Step overshot into non-finite territory; retreat.
        alpha = 0.5 * (a_prev + alpha);
        nonfinite = true;
        continue;
      }
      nonfinite = false;
      if (fv > phi0 + c1 * alpha * dphi0 || (ls > 1 && fv >= f_prev)) {
        a_lo = a_prev; f_lo = f_prev; d_lo = d_prev;
        a_hi = alpha; f_hi = fv; d_hi = dv;
        bracketed = true;
        break;
      }
      if (std::abs(dv) <= -c2 * dphi0) {
        accepted = true;
        a_acc = alpha; f_acc = fv; d_acc = dv;
        break;
      }
      if (dv >= 0.0) {
        a_lo = alpha; f_lo = fv; d_lo = dv;
        a_hi = a_prev; f_hi = f_prev; d_hi = d_prev;
        bracketed = true;
        break;
      }
      a_prev = alpha; f_prev = fv; d_prev = dv;
      alpha = std::min(2.0 * alpha, 1e10);
    }

    if (bracketed && !accepted) {
      while (ls < cfg.max_line_search) {
        ++ls;
        double aj = cubic_min(a_lo, f_lo, d_lo, a_hi, f_hi, d_hi);
        double dv = 0.0;
        const double fv = phi(aj, dv);
        if (!finite(fv) || !finite(dv)) {
          a_hi = aj; f_hi = f_lo; d_hi = d_lo; // shrink toward lo
          continue;
        }
        if (fv > phi0 + c1 * aj * dphi0 || fv >= f_lo) {
          a_hi = aj; f_hi = fv; d_hi = dv;
        } else {
          if (std::abs(dv) <= -c2 * dphi0) {
            accepted = true;
            a_acc = aj; f_acc = fv; d_acc = dv;
            break;
          }
          if (dv * (a_hi - a_lo) >= 0.0) {
            a_hi = a_lo; f_hi = f_lo; d_hi = d_lo;
          }
          a_lo = aj; f_lo = fv; d_lo = dv;
        }
        if (std::abs(a_hi - a_lo) <= 1e-16 * std::max(1.0, std::abs(a_lo))) break;
      }
      // Fall back to the lower bracket point when it strictly improves:
      // Armijo held there, only the curvature condition is unmet.
      if (!accepted && a_lo > 0.0 && f_lo < phi0) {
        double dv = 0.0;
        const double fv = phi(a_lo, dv); // re-evaluate to refresh g_trial
        accepted = finite(fv) && fv <= f_lo + 1e-12 * std::abs(f_lo);
        a_acc = a_lo; f_acc = fv; d_acc = dv;
      }
    }

    if (!accepted || nonfinite) {
      res.status = nonfinite ? LbfgsStatus::aborted_nonfinite
                             : LbfgsStatus::line_search_failed;
      res.iterations = iter - 1;
      return res;
    }

    // Accept the step.
    Pair pr;
    pr.s.resize(n);
    pr.y.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      pr.s[k] = a_acc * d[k];
      res.x[k] += pr.s[k];
      pr.y[k] = g_trial[k] - g[k];
    }
    f = f_acc;
    g = g_trial;
    res.value = f;
    res.iterations = iter;
    const double gnorm = norm(g);
    res.trace.push_back({iter, f, gnorm});

    const double sy = dot(pr.s, pr.y);
    if (sy > 1e-10 * norm(pr.s) * norm(pr.y)) {
      pr.rho = 1.0 / sy;
      mem.push_back(std::move(pr));
      if (static_cast<int>(mem.size()) > cfg.history) mem.pop_front();
    } else {
      ++res.discarded_pairs;
    }

    if (gnorm <= cfg.grad_tol) {
      res.status = LbfgsStatus::converged;
      return res;
    }
    (void)d_acc;
  }
  res.status = LbfgsStatus::max_iterations;
  return res;
}

} // namespace hns
