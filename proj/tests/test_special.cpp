#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hns/special.hpp"

using namespace hns;

TEST_SUITE_BEGIN("special");

TEST_CASE("gamma at integer and half-integer points") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_fn(3.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(gamma_fn(0.5) ==
        doctest::Approx(1.7724538509055160273).epsilon(1e-13));
  CHECK(gamma_fn(6.0) == doctest::Approx(120.0).epsilon(1e-13));
}

TEST_CASE("gamma recurrence Gamma(x+1) = x Gamma(x)") {
  for (double x = 0.1; x <= 10.0; x += 0.173) {
    const double lhs = gamma_fn(x + 1.0);
    const double rhs = x * gamma_fn(x);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
  }
}

TEST_CASE("gamma agrees with libm over (0, 20]") {
  for (double x = 0.05; x <= 20.0; x += 0.31) {
    const double ref = std::tgamma(x);
    CHECK(std::abs(gamma_fn(x) - ref) <= 1e-13 * std::abs(ref));
  }
}

TEST_CASE("gamma pole raises") {
  CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
  CHECK_THROWS_AS(gamma_fn(-1.0), std::domain_error);
  CHECK_THROWS_AS(gamma_fn(-7.0), std::domain_error);
}

TEST_CASE("log_gamma matches log of gamma") {
  for (double x = 0.2; x <= 20.0; x += 0.47) {
    CHECK(log_gamma(x) ==
          doctest::Approx(std::log(std::abs(gamma_fn(x)))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
}

TEST_CASE("digamma reference values") {
  const double euler = 0.57721566490153286061;
  CHECK(digamma(1.0) == doctest::Approx(-euler).epsilon(1e-12));
  CHECK(digamma(2.0) == doctest::Approx(1.0 - euler).epsilon(1e-12));
  // psi(1/2) = -gamma - 2 ln 2
  CHECK(digamma(0.5) ==
        doctest::Approx(-euler - 2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(digamma(-3.0), std::domain_error);
}

TEST_CASE("digamma consistent with log_gamma finite differences") {
  const double h = 1e-6;
  for (double x : {0.7, 1.5, 3.3, 8.0, 19.0}) {
    const double fd = (log_gamma(x + h) - log_gamma(x - h)) / (2.0 * h);
    CHECK(std::abs(digamma(x) - fd) <= 1e-8 * std::max(1.0, std::abs(fd)));
  }
}

TEST_SUITE_END();
