#include "hns/tape.hpp"

#include "hns/special.hpp"

namespace hns {

Var Tape::lgamma_v(Var a) {
  const double x = val(a);
  return push(log_gamma(x), a.i, -1, -1, digamma(x), 0, 0);
}

void Tape::reverse(Var out) {
  const std::size_t n = val_.size();
  adj_.assign(n, 0.0);
  adj_[static_cast<std::size_t>(out.i)] = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    const double a = adj_[i];
    if (a == 0.0) continue;
    if (p1_[i] >= 0) adj_[static_cast<std::size_t>(p1_[i])] += w1_[i] * a;
    if (p2_[i] >= 0) adj_[static_cast<std::size_t>(p2_[i])] += w2_[i] * a;
    if (p3_[i] >= 0) adj_[static_cast<std::size_t>(p3_[i])] += w3_[i] * a;
  }
}

} // namespace hns
