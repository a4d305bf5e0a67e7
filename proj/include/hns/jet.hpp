#pragma once

#include <array>
#include <span>
#include <stdexcept>

#include "hns/activation.hpp"
#include "hns/tape.hpp"

namespace hns {

inline constexpr int kMaxCoords = 12;
inline constexpr int kMaxComps = 1 + 2 * kMaxCoords;

/// Which input coordinates a jet tracks and to what derivative order.
/// Component storage: [0] value, then one first-derivative slot per tracked
/// coordinate, then one second-derivative slot per order-2 coordinate.
struct JetLayout {
  int ncoords = 0;
  std::array<int, kMaxCoords> coord{};
  std::array<int, kMaxCoords> order{};
  std::array<int, kMaxCoords> d1pos{};
  std::array<int, kMaxCoords> d2pos{};
  int ncomps = 1;

  static JetLayout make(std::span<const int> coords,
                        std::span<const int> orders) {
    if (coords.size() != orders.size() ||
        coords.size() > static_cast<std::size_t>(kMaxCoords)) {
      throw std::invalid_argument("JetLayout: bad coordinate list");
    }
    JetLayout l;
    l.ncoords = static_cast<int>(coords.size());
    int pos = 1;
    for (int s = 0; s < l.ncoords; ++s) {
      l.coord[s] = coords[s];
      l.order[s] = orders[s];
      if (orders[s] < 1 || orders[s] > 2) {
        throw std::invalid_argument("JetLayout: order must be 1 or 2");
      }
      l.d1pos[s] = pos++;
      l.d2pos[s] = -1;
    }
    for (int s = 0; s < l.ncoords; ++s) {
      if (l.order[s] == 2) l.d2pos[s] = pos++;
    }
    l.ncomps = pos;
    return l;
  }

  int slot_of(int coordinate) const {
    for (int s = 0; s < ncoords; ++s) {
      if (coord[s] == coordinate) return s;
    }
    return -1;
  }
};

template <class S>
struct Jet {
  std::array<S, kMaxComps> c{};
};

/// Scalar operation set over plain doubles.
struct DoubleOps {
  using Scalar = double;
  double constant(double v) { return v; }
  double add(double a, double b) { return a + b; }
  double sub(double a, double b) { return a - b; }
  double mul(double a, double b) { return a * b; }
  double fma(double a, double b, double c) { return a * b + c; }
  double axpy_c(double a, double k, double c) { return a * k + c; }
  double mul_c(double a, double k) { return a * k; }
  double add_c(double a, double k) { return a + k; }
  double square(double a) { return a * a; }
  double gelu0(double a) { return gelu_value(a); }
  double gelu1(double a) { return gelu_d1(a); }
  double gelu2(double a) { return gelu_d2(a); }
  double value(double a) const { return a; }
};

/// Scalar operation set recording onto a Tape.
struct TapeOps {
  using Scalar = Var;
  Tape* tape;
  Var constant(double v) { return tape->constant(v); }
  Var add(Var a, Var b) { return tape->add(a, b); }
  Var sub(Var a, Var b) { return tape->sub(a, b); }
  Var mul(Var a, Var b) { return tape->mul(a, b); }
  Var fma(Var a, Var b, Var c) { return tape->fma(a, b, c); }
  Var axpy_c(Var a, double k, Var c) { return tape->axpy_c(a, k, c); }
  Var mul_c(Var a, double k) { return tape->mul_c(a, k); }
  Var add_c(Var a, double k) { return tape->add_c(a, k); }
  Var square(Var a) { return tape->square(a); }
  Var gelu0(Var a) { return tape->gelu0(a); }
  Var gelu1(Var a) { return tape->gelu1(a); }
  Var gelu2(Var a) { return tape->gelu2(a); }
  double value(Var a) const { return tape->value(a); }
};

/// c = a + b componentwise.
template <class Ops, class S = typename Ops::Scalar>
Jet<S> jet_add(Ops& ops, const JetLayout& L, const Jet<S>& a, const Jet<S>& b) {
  Jet<S> r;
  for (int i = 0; i < L.ncomps; ++i) r.c[i] = ops.add(a.c[i], b.c[i]);
  return r;
}

/// Leibniz product over the tracked components:
///   (ab)   = a b
///   (ab)'  = a' b + a b'
///   (ab)'' = a'' b + 2 a' b' + a b''.
template <class Ops, class S = typename Ops::Scalar>
Jet<S> jet_mul(Ops& ops, const JetLayout& L, const Jet<S>& a, const Jet<S>& b) {
  Jet<S> r;
  r.c[0] = ops.mul(a.c[0], b.c[0]);
  for (int s = 0; s < L.ncoords; ++s) {
    const int p1 = L.d1pos[s];
    r.c[p1] = ops.fma(a.c[0], b.c[p1], ops.mul(a.c[p1], b.c[0]));
    if (L.d2pos[s] >= 0) {
      const int p2 = L.d2pos[s];
      S t = ops.mul_c(ops.mul(a.c[p1], b.c[p1]), 2.0);
      t = ops.fma(a.c[0], b.c[p2], t);
      r.c[p2] = ops.fma(a.c[p2], b.c[0], t);
    }
  }
  return r;
}

/// GELU applied through the jet: chain rule with the exact first and second
/// activation derivatives.
template <class Ops, class S = typename Ops::Scalar>
Jet<S> jet_gelu(Ops& ops, const JetLayout& L, const Jet<S>& a) {
  Jet<S> r;
  r.c[0] = ops.gelu0(a.c[0]);
  if (L.ncomps == 1) return r;
  const S g1 = ops.gelu1(a.c[0]);
  S g2{};
  bool has_g2 = false;
  for (int s = 0; s < L.ncoords; ++s) {
    const int p1 = L.d1pos[s];
    r.c[p1] = ops.mul(g1, a.c[p1]);
    if (L.d2pos[s] >= 0) {
      if (!has_g2) {
        g2 = ops.gelu2(a.c[0]);
        has_g2 = true;
      }
      const int p2 = L.d2pos[s];
      r.c[p2] = ops.fma(g1, a.c[p2], ops.mul(g2, ops.square(a.c[p1])));
    }
  }
  return r;
}

} // namespace hns
