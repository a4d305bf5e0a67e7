#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hns/problems.hpp"

using namespace hns;

TEST_SUITE_BEGIN("problems");

TEST_CASE("catalog lists the six benchmarks") {
  const auto ids = builtin_problem_ids();
  CHECK(ids.size() == 6);
  for (const auto& id : ids) {
    const auto pb = make_problem(id);
    CHECK(pb.id == id);
    // The construction spot check already ran; rerun with more points.
    CHECK(exact_residual_check(pb, 50, 777) <= 1e-9);
  }
}

TEST_CASE("unknown problem id raises") {
  CHECK_THROWS_AS(make_problem("nope"), std::invalid_argument);
}

TEST_CASE("fde exact solution values") {
  const auto pb = make_problem("fde", 0.5);
  CHECK(pb.exact({}, 2.0) == doctest::Approx(5.0)); // 1 + 2^2
  CHECK(pb.dim == 0);
  CHECK(pb.t_final == 2.0);
  CHECK(!pb.has_boundary);
}

TEST_CASE("tfde initial condition at t = 0") {
  const auto pb = make_problem("tfde", 0.65);
  const std::vector<double> x{1.0};
  CHECK(pb.exact(x, 0.0) == doctest::Approx(1.0)); // x^2 at x = 1
  CHECK(pb.initial(x).value == doctest::Approx(1.0));
  CHECK(pb.has_boundary);
}

TEST_CASE("tfade2d forcing matches the closed form") {
  const auto pb = make_problem("tfade2d", 0.85);
  const std::vector<double> x{0.3, 0.6};
  const double t = 0.4;
  // g = [2 t^(2-a)/Gamma(3-a) - 2 t^2] e^(x+y)
  const double want = (2.0 * std::pow(t, 1.15) / std::tgamma(2.15) -
                       2.0 * t * t) *
                      std::exp(0.9);
  CHECK(pb.forcing(x, t) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("10D exact at the origin sums the cosines") {
  const auto pb = make_problem("adv10d", 0.5);
  const std::vector<double> x(10, 0.0);
  CHECK(pb.exact(x, 1.0) == doctest::Approx(10.0));
  CHECK(pb.dim == 10);
  CHECK(pb.beta == 0.0);
  CHECK(pb.gamma == 1.0);
}

TEST_CASE("inverse benchmark carries the advection-diffusion operator") {
  const auto pb = make_problem("inv3d", 0.5);
  CHECK(pb.beta == 1.0);
  CHECK(pb.gamma == 1.0);
  CHECK(pb.dim == 3);
  const std::vector<double> x{0.1, 0.2, 0.3};
  CHECK(pb.exact(x, 0.0) == 0.0); // I == 0
}

TEST_CASE("alpha override propagates to the forcing") {
  const auto p1 = make_problem("fde", 0.3);
  const auto p2 = make_problem("fde", 0.7);
  CHECK(p1.alpha == 0.3);
  CHECK(p2.alpha == 0.7);
  CHECK(p1.forcing({}, 1.5) != p2.forcing({}, 1.5));
}

TEST_SUITE_END();
