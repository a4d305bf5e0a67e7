#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "hns/activation.hpp"

namespace hns {

/// Handle to a node on a Tape.
struct Var {
  std::int32_t i = -1;
  bool valid() const { return i >= 0; }
};

/// Scalar reverse-mode tape. Nodes store their value and the local partial
/// derivatives with respect to up to three parents; a single backward sweep
/// accumulates adjoints. All node creation happens on the forward pass, so
/// partials are plain numbers by the time reverse() runs.
class Tape {
 public:
  void reset() {
    val_.clear();
    p1_.clear();
    p2_.clear();
    p3_.clear();
    w1_.clear();
    w2_.clear();
    w3_.clear();
  }

  void reserve(std::size_t n) {
    val_.reserve(n);
    p1_.reserve(n);
    p2_.reserve(n);
    p3_.reserve(n);
    w1_.reserve(n);
    w2_.reserve(n);
    w3_.reserve(n);
  }

  std::size_t size() const { return val_.size(); }
  double value(Var v) const { return val_[static_cast<std::size_t>(v.i)]; }

  Var leaf(double v) { return push(v, -1, -1, -1, 0, 0, 0); }
  Var constant(double v) { return push(v, -1, -1, -1, 0, 0, 0); }

  Var add(Var a, Var b) { return push(val(a) + val(b), a.i, b.i, -1, 1.0, 1.0, 0); }
  Var sub(Var a, Var b) { return push(val(a) - val(b), a.i, b.i, -1, 1.0, -1.0, 0); }
  Var mul(Var a, Var b) { return push(val(a) * val(b), a.i, b.i, -1, val(b), val(a), 0); }
  Var div(Var a, Var b) {
    const double inv = 1.0 / val(b);
    const double q = val(a) * inv;
    return push(q, a.i, b.i, -1, inv, -q * inv, 0);
  }
  Var neg(Var a) { return push(-val(a), a.i, -1, -1, -1.0, 0, 0); }
  Var add_c(Var a, double c) { return push(val(a) + c, a.i, -1, -1, 1.0, 0, 0); }
  Var sub_rc(double c, Var a) { return push(c - val(a), a.i, -1, -1, -1.0, 0, 0); }
  Var mul_c(Var a, double c) { return push(val(a) * c, a.i, -1, -1, c, 0, 0); }
  Var square(Var a) { return push(val(a) * val(a), a.i, -1, -1, 2.0 * val(a), 0, 0); }

  /// a * b + c in one node.
  Var fma(Var a, Var b, Var c) {
    return push(val(a) * val(b) + val(c), a.i, b.i, c.i, val(b), val(a), 1.0);
  }
  /// a * k + c, k constant.
  Var axpy_c(Var a, double k, Var c) {
    return push(val(a) * k + val(c), a.i, c.i, -1, k, 1.0, 0);
  }

  Var exp_v(Var a) {
    const double e = std::exp(val(a));
    return push(e, a.i, -1, -1, e, 0, 0);
  }
  Var log_v(Var a) { return push(std::log(val(a)), a.i, -1, -1, 1.0 / val(a), 0, 0); }
  Var sin_v(Var a) { return push(std::sin(val(a)), a.i, -1, -1, std::cos(val(a)), 0, 0); }
  Var cos_v(Var a) { return push(std::cos(val(a)), a.i, -1, -1, -std::sin(val(a)), 0, 0); }
  Var sqrt_v(Var a) {
    const double r = std::sqrt(val(a));
    return push(r, a.i, -1, -1, 0.5 / r, 0, 0);
  }
  Var pow_c(Var a, double e) {
    const double pm1 = std::pow(val(a), e - 1.0);
    return push(pm1 * val(a), a.i, -1, -1, e * pm1, 0, 0);
  }
  Var sigmoid_v(Var a) {
    const double s = 1.0 / (1.0 + std::exp(-val(a)));
    return push(s, a.i, -1, -1, s * (1.0 - s), 0, 0);
  }
  /// log Gamma for positive argument; the partial is digamma.
  Var lgamma_v(Var a);

  Var gelu0(Var a) {
    const double x = val(a);
    return push(gelu_value(x), a.i, -1, -1, gelu_d1(x), 0, 0);
  }
  Var gelu1(Var a) {
    const double x = val(a);
    return push(gelu_d1(x), a.i, -1, -1, gelu_d2(x), 0, 0);
  }
  Var gelu2(Var a) {
    const double x = val(a);
    return push(gelu_d2(x), a.i, -1, -1, gelu_d3(x), 0, 0);
  }

  /// Backward sweep seeding d(out)/d(out) = 1. Adjoints of every node are
  /// available through adjoint() afterwards.
  void reverse(Var out);

  double adjoint(Var v) const { return adj_[static_cast<std::size_t>(v.i)]; }

 private:
  double val(Var v) const { return val_[static_cast<std::size_t>(v.i)]; }

  Var push(double v, std::int32_t a, std::int32_t b, std::int32_t c,
           double wa, double wb, double wc) {
    const std::int32_t idx = static_cast<std::int32_t>(val_.size());
    val_.push_back(v);
    p1_.push_back(a);
    p2_.push_back(b);
    p3_.push_back(c);
    w1_.push_back(wa);
    w2_.push_back(wb);
    w3_.push_back(wc);
    return Var{idx};
  }

  std::vector<double> val_;
  std::vector<std::int32_t> p1_, p2_, p3_;
  std::vector<double> w1_, w2_, w3_;
  std::vector<double> adj_;
};

} // namespace hns
