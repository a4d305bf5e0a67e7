#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hns/jet.hpp"

namespace hns {

/// Fully connected network with GELU hidden activations and a linear output
/// layer. Parameters live in one flat vector: per layer the weight matrix in
/// output-major order followed by the biases.
struct DenseNet {
  std::vector<int> layer_sizes;
  std::vector<double> params;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int param_count() const {
    int n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
      n += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
    }
    return n;
  }
};

/// Glorot-uniform weights, zero biases, bitwise deterministic under seed.
DenseNet init_net(std::uint64_t seed, std::vector<int> layer_sizes);

/// Text checkpoint: layer_sizes header line followed by one parameter per
/// line at full double precision. Round-trips bit exactly.
void save_net(const DenseNet& net, const std::string& path);
DenseNet load_net(const std::string& path);

/// Value plus requested exact derivatives at one input point.
/// Coordinates not requested are absent from the maps.
struct JetValue {
  double value = 0.0;
  std::map<int, double> d1;
  std::map<int, double> d2;
};

/// Exact jet evaluation (Taylor propagation, not finite differences).
/// order = 1 tracks first derivatives of the listed coordinates, order = 2
/// additionally tracks the pure second derivatives.
JetValue eval_jet(const DenseNet& net, std::span<const double> input,
                  std::span<const int> coords, int order);

/// Plain forward value (no derivative tracking).
double net_value(const DenseNet& net, std::span<const double> input);

/// Jet forward pass, generic over the scalar set (doubles or tape vars).
/// `params` follows the DenseNet flat layout; `input` supplies the
/// coordinate values. Tracked coordinates must be valid input indices.
template <class Ops, class S = typename Ops::Scalar>
Jet<S> net_forward_jets(Ops& ops, const JetLayout& L,
                        std::span<const int> sizes, std::span<const S> params,
                        std::span<const double> input) {
  const int nin = sizes.front();
  std::vector<Jet<S>> act(static_cast<std::size_t>(nin));

  // First layer: affine in the raw inputs, so first-derivative components
  // are the weights themselves and second-derivative components vanish.
  std::size_t off = 0;
  {
    const int nout = sizes[1];
    std::vector<Jet<S>> z(static_cast<std::size_t>(nout));
    const std::size_t boff = off + static_cast<std::size_t>(nout) * nin;
    for (int o = 0; o < nout; ++o) {
      Jet<S>& zo = z[static_cast<std::size_t>(o)];
      S acc = params[boff + static_cast<std::size_t>(o)];
      for (int i = 0; i < nin; ++i) {
        if (input[static_cast<std::size_t>(i)] != 0.0) {
          acc = ops.axpy_c(params[off + static_cast<std::size_t>(o) * nin + i],
                           input[static_cast<std::size_t>(i)], acc);
        }
      }
      zo.c[0] = acc;
      for (int s = 0; s < L.ncoords; ++s) {
        zo.c[L.d1pos[s]] =
            params[off + static_cast<std::size_t>(o) * nin + L.coord[s]];
        if (L.d2pos[s] >= 0) zo.c[L.d2pos[s]] = ops.constant(0.0);
      }
    }
    off = boff + static_cast<std::size_t>(nout);
    act.resize(static_cast<std::size_t>(nout));
    const bool first_is_last = (sizes.size() == 2);
    for (int o = 0; o < nout; ++o) {
      act[static_cast<std::size_t>(o)] =
          first_is_last ? z[static_cast<std::size_t>(o)]
                        : jet_gelu(ops, L, z[static_cast<std::size_t>(o)]);
    }
  }

  for (std::size_t layer = 1; layer + 1 < sizes.size(); ++layer) {
    const int ni = sizes[layer];
    const int no = sizes[layer + 1];
    const bool last = (layer + 2 == sizes.size());
    const std::size_t boff = off + static_cast<std::size_t>(no) * ni;
    std::vector<Jet<S>> z(static_cast<std::size_t>(no));
    for (int o = 0; o < no; ++o) {
      Jet<S>& zo = z[static_cast<std::size_t>(o)];
      const S bias = params[boff + static_cast<std::size_t>(o)];
      zo.c[0] = bias;
      for (int c = 1; c < L.ncomps; ++c) zo.c[c] = ops.constant(0.0);
      for (int i = 0; i < ni; ++i) {
        const S w = params[off + static_cast<std::size_t>(o) * ni + i];
        const Jet<S>& ai = act[static_cast<std::size_t>(i)];
        for (int c = 0; c < L.ncomps; ++c) {
          zo.c[c] = ops.fma(w, ai.c[c], zo.c[c]);
        }
      }
      if (!last) zo = jet_gelu(ops, L, zo);
    }
    off = boff + static_cast<std::size_t>(no);
    act = std::move(z);
  }
  return act.front();
}

} // namespace hns
