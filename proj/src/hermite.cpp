#include "hns/hermite.hpp"

#include <stdexcept>

namespace hns {

HermiteBasis hermite_basis(int p) {
  HermiteBasis b;
  b.p = p;
  switch (p) {
    case 1:
      b.fns = {
          {0, false, {{1.0, -1.0}}}, // 1 - tau
          {0, true, {{0.0, 1.0}}},   // tau
      };
      break;
    case 3:
      b.fns = {
          {0, false, {{1.0, 0.0, -3.0, 2.0}}}, // 1 - 3 tau^2 + 2 tau^3
          {0, true, {{0.0, 0.0, 3.0, -2.0}}},  // 3 tau^2 - 2 tau^3
          {1, false, {{0.0, 1.0, -2.0, 1.0}}}, // tau - 2 tau^2 + tau^3
          {1, true, {{0.0, 0.0, -1.0, 1.0}}},  // -tau^2 + tau^3
      };
      break;
    case 5:
      b.fns = {
          {0, false, {{1.0, 0.0, 0.0, -10.0, 15.0, -6.0}}},
          {0, true, {{0.0, 0.0, 0.0, 10.0, -15.0, 6.0}}},
          {1, false, {{0.0, 1.0, 0.0, -6.0, 8.0, -3.0}}},
          {1, true, {{0.0, 0.0, 0.0, -4.0, 7.0, -3.0}}},
          {2, false, {{0.0, 0.0, 0.5, -1.5, 1.5, -0.5}}},
          {2, true, {{0.0, 0.0, 0.0, 0.5, -1.0, 0.5}}},
      };
      break;
    default:
      throw std::domain_error("hermite_basis: p must be 1, 3, or 5");
  }
  return b;
}

} // namespace hns
