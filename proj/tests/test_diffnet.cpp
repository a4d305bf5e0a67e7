#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "hns/activation.hpp"
#include "hns/grad.hpp"
#include "hns/net.hpp"
#include "hns/trial.hpp"

using namespace hns;

namespace {

double rand01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

TEST_SUITE_BEGIN("diffnet");

TEST_CASE("init_net determinism and parameter count") {
  const std::vector<int> sizes{2, 20, 20, 20, 20, 1};
  const auto a = init_net(7, sizes);
  const auto b = init_net(7, sizes);
  CHECK(a.params == b.params);
  CHECK(a.param_count() == 1341);
  CHECK(static_cast<int>(a.params.size()) == 1341);

  const auto c = init_net(8, sizes);
  CHECK(a.params != c.params);

  CHECK_THROWS_AS(init_net(1, {3}), std::invalid_argument);
}

TEST_CASE("gelu identities") {
  CHECK(gelu_value(0.0) == 0.0);
  // Reflection: gelu(x) - gelu(-x) = x Phi(x) + x Phi(-x) = x.
  for (double x : {-3.0, -1.2, -0.5, 0.1, 0.9, 2.4}) {
    CHECK(std::abs(gelu_value(x) - gelu_value(-x) - x) <= 1e-14);
  }
}

TEST_CASE("constant network has zero derivatives") {
  auto net = init_net(3, {2, 4, 1});
  for (auto& p : net.params) p = 0.0;
  net.params.back() = 0.8; // output bias
  const std::vector<double> x{0.3, -0.4};
  const std::vector<int> coords{0, 1};
  const auto j = eval_jet(net, x, coords, 2);
  CHECK(j.value == doctest::Approx(0.8));
  for (int c : coords) {
    CHECK(j.d1.at(c) == 0.0);
    CHECK(j.d2.at(c) == 0.0);
  }
}

TEST_CASE("single linear layer jets") {
  DenseNet net;
  net.layer_sizes = {2, 1};
  net.params = {1.5, -2.0, 0.25}; // w = (1.5, -2), b = 0.25
  const std::vector<double> x{0.7, 0.1};
  const std::vector<int> coords{0, 1};
  const auto j = eval_jet(net, x, coords, 2);
  CHECK(j.value == doctest::Approx(1.5 * 0.7 - 2.0 * 0.1 + 0.25));
  CHECK(j.d1.at(0) == doctest::Approx(1.5));
  CHECK(j.d1.at(1) == doctest::Approx(-2.0));
  CHECK(j.d2.at(0) == 0.0);
  CHECK(j.d2.at(1) == 0.0);
}

TEST_CASE("jets agree with central finite differences") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto net = init_net(100 + static_cast<std::uint64_t>(trial), {2, 6, 6, 1});
    std::vector<double> x{rand01(rng), rand01(rng)};
    const std::vector<int> coords{0, 1};
    const auto j = eval_jet(net, x, coords, 2);
    const double h = 1e-5;
    for (int c : coords) {
      auto at = [&](double delta) {
        auto xx = x;
        xx[static_cast<std::size_t>(c)] += delta;
        return net_value(net, xx);
      };
      const double fd1 = (at(h) - at(-h)) / (2.0 * h);
      const double fd2 = (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h);
      CHECK(std::abs(j.d1.at(c) - fd1) <= 1e-6 * std::max(1.0, std::abs(fd1)));
      CHECK(std::abs(j.d2.at(c) - fd2) <= 1e-4 * std::max(1.0, std::abs(fd2)));
    }
  }
}

TEST_CASE("order-1 and order-2 evaluations share first derivatives") {
  auto net = init_net(21, {3, 8, 8, 1});
  const std::vector<double> x{0.2, 0.5, 0.9};
  const std::vector<int> coords{0, 2};
  const auto j1 = eval_jet(net, x, coords, 1);
  const auto j2 = eval_jet(net, x, coords, 2);
  CHECK(j1.value == j2.value);
  for (int c : coords) {
    CHECK(std::abs(j1.d1.at(c) - j2.d1.at(c)) <= 1e-14);
    CHECK(j1.d2.count(c) == 0);
    CHECK(j2.d2.count(c) == 1);
  }
}

TEST_CASE("checkpoint round trip is bitwise") {
  const auto net = init_net(5, {3, 10, 10, 1});
  const std::string path = "/tmp/hns_net_roundtrip.txt";
  save_net(net, path);
  const auto back = load_net(path);
  CHECK(back.layer_sizes == net.layer_sizes);
  CHECK(back.params == net.params);
  std::remove(path.c_str());
}

TEST_CASE("trial solution pins the initial condition") {
  TrialSolution trial;
  trial.net = init_net(17, {2, 8, 8, 1});
  trial.initial = [](std::span<const double> x) {
    InitialData d;
    d.value = x[0] * x[0];
    d.d1[0] = 2.0 * x[0];
    d.d2[0] = 2.0;
    return d;
  };
  std::mt19937_64 rng(2);
  const std::vector<int> coords{0, 1};
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x{rand01(rng)};
    const auto j = trial_jet(trial, x, 0.0, coords, 1);
    CHECK(j.value == x[0] * x[0]); // exact, multiplicative t factor
  }
}

TEST_CASE("trial with zero initial equals the bare network at t = 1") {
  TrialSolution trial;
  trial.net = init_net(23, {2, 6, 6, 1});
  const std::vector<double> x{0.35};
  const std::vector<int> coords{0, 1};
  const auto tj = trial_jet(trial, x, 1.0, coords, 1);
  const std::vector<double> input{0.35, 1.0};
  const auto nj = eval_jet(trial.net, input, coords, 1);
  CHECK(tj.value == doctest::Approx(nj.value).epsilon(1e-15));
  // d/dx u~ = t d/dx f at t = 1.
  CHECK(tj.d1.at(0) == doctest::Approx(nj.d1.at(0)).epsilon(1e-15));
  // d/dt u~ = f + t d/dt f.
  CHECK(tj.d1.at(1) == doctest::Approx(nj.value + nj.d1.at(1)).epsilon(1e-14));
}

TEST_CASE("trial second spatial derivative follows the product rule") {
  TrialSolution trial;
  trial.net = init_net(31, {2, 6, 6, 1});
  trial.initial = [](std::span<const double> x) {
    InitialData d;
    d.value = x[0] * x[0];
    d.d1[0] = 2.0 * x[0];
    d.d2[0] = 2.0;
    return d;
  };
  const std::vector<double> x{0.45};
  const double t = 0.6;
  const std::vector<int> coords{0};
  const auto tj = trial_jet(trial, x, t, coords, 2);
  const std::vector<double> input{0.45, t};
  const auto nj = eval_jet(trial.net, input, coords, 2);
  CHECK(tj.d2.at(0) == doctest::Approx(t * nj.d2.at(0) + 2.0).epsilon(1e-13));
}

TEST_CASE("loss gradient at a squared trial value matches finite differences") {
  TrialSolution trial;
  trial.net = init_net(41, {2, 5, 5, 1});
  for (auto& p : trial.net.params) p = 0.0;
  trial.initial = [](std::span<const double>) {
    InitialData d;
    d.value = 1.0;
    return d;
  };
  const std::vector<double> x{0.3};
  const double t = 0.8;
  const std::vector<int> tc{1};
  const std::vector<int> to{1};
  const JetLayout L = JetLayout::make(tc, to);

  auto build = [&](JetContext& ctx) {
    const auto u = ctx.trial(trial, x, t, L);
    return ctx.tape().square(u.c[0]);
  };
  const auto res = loss_gradient(trial.net, build);
  CHECK(res.value == doctest::Approx(1.0)); // u~ = t*0 + 1

  double gmax = 0.0;
  const double h = 1e-6;
  for (std::size_t i = 0; i < trial.net.params.size(); ++i) {
    auto plus = trial;
    plus.net.params[i] += h;
    auto minus = trial;
    minus.net.params[i] -= h;
    auto val = [&](const TrialSolution& tr) {
      DoubleOps ops;
      InitialData init = tr.initial(x);
      const auto u = trial_forward_jets(ops, L, tr.net.layer_sizes,
                                        std::span<const double>(tr.net.params),
                                        x, t, &init);
      return u.c[0] * u.c[0];
    };
    const double fd = (val(plus) - val(minus)) / (2.0 * h);
    CHECK(std::abs(res.param_grad[i] - fd) <= 2e-6 * std::max(1.0, std::abs(fd)));
    gmax = std::max(gmax, std::abs(res.param_grad[i]));
  }
  CHECK(gmax > 0.0); // the output-bias path must be live
}

TEST_CASE("gradient is zero for parameters the loss never touches") {
  auto net = init_net(51, {2, 4, 1});
  auto build = [&](JetContext& ctx) {
    // Loss uses only the extras, not the network.
    return ctx.tape().square(ctx.extras()[0]);
  };
  const std::vector<double> extras{3.0};
  const auto res = loss_gradient(net, build, extras);
  CHECK(res.value == doctest::Approx(9.0));
  CHECK(res.extra_grad[0] == doctest::Approx(6.0));
  for (double g : res.param_grad) CHECK(g == 0.0);
}

TEST_CASE("quadratic loss in one weight has a linear gradient") {
  DenseNet net;
  net.layer_sizes = {1, 1};
  net.params = {2.0, 0.0}; // w, b
  auto grad_at = [&](double w) {
    auto n2 = net;
    n2.params[0] = w;
    auto build = [&](JetContext& ctx) {
      return ctx.tape().square(ctx.params()[0]);
    };
    return loss_gradient(n2, build).param_grad[0];
  };
  CHECK(grad_at(2.0) == doctest::Approx(4.0));
  CHECK(grad_at(3.0) == doctest::Approx(6.0));
  CHECK(grad_at(-1.0) == doctest::Approx(-2.0));
}

TEST_CASE("property: gradients of mixed jet losses match finite differences") {
  std::mt19937_64 rng(99);
  int checked = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    auto net = init_net(1000 + static_cast<std::uint64_t>(trial), {2, 5, 5, 1});
    const std::vector<int> coords{0, 1};
    const std::vector<int> ords{2, 2};
    const JetLayout L = JetLayout::make(coords, ords);
    std::array<double, 5> mix{};
    for (auto& m : mix) m = 2.0 * rand01(rng) - 1.0;
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < 3; ++k) pts.push_back({rand01(rng), rand01(rng)});

    auto value_only = [&](const DenseNet& n) {
      DoubleOps ops;
      double acc = 0.0;
      for (const auto& p : pts) {
        const auto j = net_forward_jets(ops, L, n.layer_sizes,
                                        std::span<const double>(n.params), p);
        const double term = mix[0] * j.c[0] + mix[1] * j.c[L.d1pos[0]] +
                            mix[2] * j.c[L.d1pos[1]] + mix[3] * j.c[L.d2pos[0]] +
                            mix[4] * j.c[L.d2pos[1]];
        acc += term * term;
      }
      return acc;
    };
    auto build = [&](JetContext& ctx) {
      Tape& tp = ctx.tape();
      Var acc = tp.constant(0.0);
      for (const auto& p : pts) {
        const auto j = ctx.eval(p, L);
        Var term = tp.mul_c(j.c[0], mix[0]);
        term = tp.axpy_c(j.c[L.d1pos[0]], mix[1], term);
        term = tp.axpy_c(j.c[L.d1pos[1]], mix[2], term);
        term = tp.axpy_c(j.c[L.d2pos[0]], mix[3], term);
        term = tp.axpy_c(j.c[L.d2pos[1]], mix[4], term);
        acc = tp.add(tp.square(term), acc);
      }
      return acc;
    };
    const auto res = loss_gradient(net, build);
    CHECK(res.value == doctest::Approx(value_only(net)).epsilon(1e-13));

    const double h = 1e-6;
    for (std::size_t i = 0; i < net.params.size(); i += 7) {
      auto plus = net;
      plus.params[i] += h;
      auto minus = net;
      minus.params[i] -= h;
      const double fd = (value_only(plus) - value_only(minus)) / (2.0 * h);
      if (std::abs(res.param_grad[i]) > 1e-8) {
        const double rel =
            std::abs(res.param_grad[i] - fd) / std::max(std::abs(fd), 1e-8);
        worst = std::max(worst, rel);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
  CHECK(worst <= 1e-6);
}

TEST_SUITE_END();
