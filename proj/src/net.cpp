#include "hns/net.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "hns/grad.hpp"
#include "hns/trial.hpp"

namespace hns {

namespace {

double uniform01(std::mt19937_64& rng) {
  // 53 random bits; avoids the implementation-defined distribution classes.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

JetLayout layout_from(std::span<const int> coords, int order) {
  std::vector<int> orders(coords.size(), order);
  return JetLayout::make(coords, orders);
}

JetValue pack_jet(const JetLayout& L, const Jet<double>& j,
                  std::span<const int> coords, int order) {
  JetValue out;
  out.value = j.c[0];
  for (int idx : coords) {
    const int s = L.slot_of(idx);
    out.d1[idx] = j.c[L.d1pos[s]];
    if (order >= 2) out.d2[idx] = j.c[L.d2pos[s]];
  }
  return out;
}

} // namespace

DenseNet init_net(std::uint64_t seed, std::vector<int> layer_sizes) {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("init_net: need at least input and output");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw std::invalid_argument("init_net: layer sizes must be >= 1");
  }
  DenseNet net;
  net.layer_sizes = std::move(layer_sizes);
  net.params.resize(static_cast<std::size_t>(net.param_count()));
  std::mt19937_64 rng(seed);
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    const int nin = net.layer_sizes[l];
    const int nout = net.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (nin + nout));
    for (int i = 0; i < nin * nout; ++i) {
      net.params[off++] = (2.0 * uniform01(rng) - 1.0) * limit;
    }
    for (int i = 0; i < nout; ++i) net.params[off++] = 0.0; // zero biases
  }
  return net;
}

void save_net(const DenseNet& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_net: cannot open " + path);
  out << "hnsnet " << net.layer_sizes.size() << "\n";
  for (std::size_t i = 0; i < net.layer_sizes.size(); ++i) {
    out << net.layer_sizes[i] << (i + 1 < net.layer_sizes.size() ? ' ' : '\n');
  }
  char buf[40];
  for (double p : net.params) {
    std::snprintf(buf, sizeof buf, "%.17g\n", p);
    out << buf;
  }
  if (!out) throw std::runtime_error("save_net: write failed for " + path);
}

DenseNet load_net(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_net: cannot open " + path);
  std::string magic;
  std::size_t nsizes = 0;
  in >> magic >> nsizes;
  if (magic != "hnsnet" || nsizes < 2 || nsizes > 64) {
    throw std::runtime_error("load_net: bad header in " + path);
  }
  DenseNet net;
  net.layer_sizes.resize(nsizes);
  for (auto& s : net.layer_sizes) in >> s;
  if (!in) throw std::runtime_error("load_net: truncated header in " + path);
  const int count = net.param_count();
  net.params.resize(static_cast<std::size_t>(count));
  for (auto& p : net.params) in >> p;
  if (!in) throw std::runtime_error("load_net: truncated parameters in " + path);
  return net;
}

double net_value(const DenseNet& net, std::span<const double> input) {
  if (static_cast<int>(input.size()) != net.input_dim()) {
    throw std::invalid_argument("net_value: input dimension mismatch");
  }
  std::vector<double> a(input.begin(), input.end());
  std::vector<double> z;
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    const int ni = net.layer_sizes[l];
    const int no = net.layer_sizes[l + 1];
    const bool last = (l + 2 == net.layer_sizes.size());
    const std::size_t boff = off + static_cast<std::size_t>(no) * ni;
    z.assign(static_cast<std::size_t>(no), 0.0);
    for (int o = 0; o < no; ++o) {
      double acc = net.params[boff + static_cast<std::size_t>(o)];
      const double* w = net.params.data() + off + static_cast<std::size_t>(o) * ni;
      for (int i = 0; i < ni; ++i) acc += w[i] * a[static_cast<std::size_t>(i)];
      z[static_cast<std::size_t>(o)] = last ? acc : gelu_value(acc);
    }
    a = z;
    off = boff + static_cast<std::size_t>(no);
  }
  return a.front();
}

JetValue eval_jet(const DenseNet& net, std::span<const double> input,
                  std::span<const int> coords, int order) {
  if (static_cast<int>(input.size()) != net.input_dim()) {
    throw std::invalid_argument("eval_jet: input dimension mismatch");
  }
  for (int c : coords) {
    if (c < 0 || c >= net.input_dim()) {
      throw std::invalid_argument("eval_jet: coordinate out of range");
    }
  }
  const JetLayout L = layout_from(coords, order);
  DoubleOps ops;
  const Jet<double> j = net_forward_jets(
      ops, L, net.layer_sizes, std::span<const double>(net.params), input);
  return pack_jet(L, j, coords, order);
}

JetValue trial_jet(const TrialSolution& trial, std::span<const double> x,
                   double t, std::span<const int> coords, int order) {
  const JetLayout L = layout_from(coords, order);
  DoubleOps ops;
  InitialData init;
  const InitialData* ip = nullptr;
  if (trial.initial) {
    init = trial.initial(x);
    ip = &init;
  }
  const Jet<double> j =
      trial_forward_jets(ops, L, trial.net.layer_sizes,
                         std::span<const double>(trial.net.params), x, t, ip);
  return pack_jet(L, j, coords, order);
}

JetContext::JetContext(Tape& tape, const DenseNet& net,
                       std::span<const double> extras)
    : tape_(tape), net_(net) {
  param_vars_.reserve(net.params.size());
  for (double p : net.params) param_vars_.push_back(tape_.leaf(p));
  extra_vars_.reserve(extras.size());
  for (double e : extras) extra_vars_.push_back(tape_.leaf(e));
}

Jet<Var> JetContext::eval(std::span<const double> input,
                          const JetLayout& layout) {
  TapeOps ops{&tape_};
  return net_forward_jets(ops, layout, net_.layer_sizes,
                          std::span<const Var>(param_vars_), input);
}

Jet<Var> JetContext::trial(const TrialSolution& trial,
                           std::span<const double> x, double t,
                           const JetLayout& layout) {
  TapeOps ops{&tape_};
  InitialData init;
  const InitialData* ip = nullptr;
  if (trial.initial) {
    init = trial.initial(x);
    ip = &init;
  }
  return trial_forward_jets(ops, layout, trial.net.layer_sizes,
                            std::span<const Var>(param_vars_), x, t, ip);
}

LossGradResult loss_gradient(const DenseNet& net, const LossBuilder& build,
                             std::span<const double> extras) {
  Tape tape;
  JetContext ctx(tape, net, extras);
  const Var loss = build(ctx);
  tape.reverse(loss);

  LossGradResult res;
  res.value = tape.value(loss);
  res.param_grad.reserve(net.params.size());
  for (Var v : ctx.params()) res.param_grad.push_back(tape.adjoint(v));
  res.extra_grad.reserve(extras.size());
  for (Var v : ctx.extras()) res.extra_grad.push_back(tape.adjoint(v));
  return res;
}

} // namespace hns
