#include "hns/solver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include "hns/caputo.hpp"
#include "hns/net.hpp"
#include "hns/special.hpp"

namespace hns {

namespace {

constexpr std::uint64_t kTestSeed = 424242;

template <class S>
struct StencilWeightsT {
  int dmax = 0;
  std::vector<std::array<S, 3>> left, right; // per lag
};

template <class Ops, class S = typename Ops::Scalar>
StencilWeightsT<S> lift_weights(Ops& ops, const HermiteStencil& st) {
  StencilWeightsT<S> w;
  w.dmax = st.max_deriv();
  w.left.resize(st.weights.size());
  w.right.resize(st.weights.size());
  for (std::size_t l = 0; l < st.weights.size(); ++l) {
    for (int d = 0; d <= w.dmax; ++d) {
      w.left[l][static_cast<std::size_t>(d)] =
          ops.constant(st.weights[l].left[static_cast<std::size_t>(d)]);
      w.right[l][static_cast<std::size_t>(d)] =
          ops.constant(st.weights[l].right[static_cast<std::size_t>(d)]);
    }
  }
  return w;
}

// Quadrature weights as tape expressions of a variable alpha: the moments,
// the dt^(d-alpha) powers, and 1/Gamma(1-alpha) are all differentiable, so
// the backward sweep yields the exact d(loss)/d(alpha) path through the
// stencil (digamma enters via the lgamma node).
StencilWeightsT<Var> tape_weights(Tape& tp, Var alpha, int p, double dt,
                                  int nlags) {
  const HermiteBasis basis = hermite_basis(p);
  std::vector<Poly> dpolys;
  dpolys.reserve(basis.fns.size());
  for (const auto& fn : basis.fns) dpolys.push_back(fn.poly.derivative());
  const int dmax = (p - 1) / 2;

  const Var oma = tp.sub_rc(1.0, alpha); // 1 - alpha
  const Var inv_gamma = tp.exp_v(tp.neg(tp.lgamma_v(oma)));
  const double ln_dt = std::log(dt);
  std::array<Var, 3> dtpow{};
  for (int d = 0; d <= dmax; ++d) {
    dtpow[static_cast<std::size_t>(d)] =
        tp.exp_v(tp.mul_c(tp.sub_rc(static_cast<double>(d), alpha), ln_dt));
  }

  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };

  StencilWeightsT<Var> w;
  w.dmax = dmax;
  w.left.resize(static_cast<std::size_t>(nlags));
  w.right.resize(static_cast<std::size_t>(nlags));
  std::array<Var, 5> mu{};
  for (int l = 0; l < nlags; ++l) {
    const double b = l + 1.0;
    {
      const Var e1 = l == 0 ? tp.constant(1.0)
                            : tp.exp_v(tp.mul_c(oma, std::log(b)));
      const Var e0 =
          l == 0 ? tp.constant(0.0)
                 : tp.exp_v(tp.mul_c(oma, std::log(static_cast<double>(l))));
      mu[0] = tp.div(tp.sub(e1, e0), oma);
    }
    for (int j = 1; j <= p - 1; ++j) {
      if (l == 0) {
        Var acc = tp.constant(0.0);
        for (int m = 0; m <= j; ++m) {
          const Var recip = tp.pow_c(tp.sub_rc(m + 1.0, alpha), -1.0);
          const double coef = (m % 2 == 0 ? 1.0 : -1.0) * binom(j, m);
          acc = tp.axpy_c(recip, coef, acc);
        }
        mu[static_cast<std::size_t>(j)] = acc;
      } else {
        const Var pref = tp.exp_v(tp.mul_c(alpha, -std::log(b)));
        Var term = tp.constant(1.0 / (j + 1.0));
        Var sum = term;
        for (int m = 1; m < 400; ++m) {
          term = tp.mul(term, tp.add_c(alpha, m - 1.0));
          term = tp.mul_c(term, (j + m) / (m * b * (j + m + 1.0)));
          sum = tp.add(sum, term);
          if (std::abs(tp.value(term)) < 1e-17 * std::abs(tp.value(sum))) break;
        }
        mu[static_cast<std::size_t>(j)] = tp.mul(pref, sum);
      }
    }
    for (std::size_t i = 0; i < basis.fns.size(); ++i) {
      const auto& fn = basis.fns[i];
      Var k = tp.constant(0.0);
      for (std::size_t j = 0; j < dpolys[i].coef.size(); ++j) {
        if (dpolys[i].coef[j] != 0.0) {
          k = tp.axpy_c(mu[j], dpolys[i].coef[j], k);
        }
      }
      const Var weight = tp.mul(
          tp.mul(inv_gamma, dtpow[static_cast<std::size_t>(fn.deriv)]), k);
      auto& slot = fn.right ? w.right : w.left;
      slot[static_cast<std::size_t>(l)][static_cast<std::size_t>(fn.deriv)] =
          weight;
    }
  }
  return w;
}

struct LayoutInfo {
  JetLayout L;
  int t_d1 = -1;
  int t_d2 = -1;
};

LayoutInfo make_layout(const PDEProblem& pb, int p) {
  std::vector<int> coords, orders;
  const int torder = (p - 1) / 2;
  for (int d = 0; d < pb.dim; ++d) {
    if (pb.needs_spatial_d2()) {
      coords.push_back(d);
      orders.push_back(2);
    } else if (pb.needs_spatial_d1()) {
      coords.push_back(d);
      orders.push_back(1);
    }
  }
  if (torder >= 1) {
    coords.push_back(pb.dim);
    orders.push_back(torder);
  }
  LayoutInfo li;
  li.L = JetLayout::make(coords, orders);
  if (torder >= 1) {
    const int s = li.L.slot_of(pb.dim);
    li.t_d1 = li.L.d1pos[s];
    li.t_d2 = torder == 2 ? li.L.d2pos[s] : -1;
  }
  return li;
}

template <class S>
struct Coeffs {
  S beta{}, gamma{};
  double rho = 0.0;
  bool has_beta = false, has_gamma = false;
};

template <class Ops, class S = typename Ops::Scalar>
struct Assembly {
  Ops ops;
  const PDEProblem* pb;
  const LayoutInfo* li;
  const JetLayout* bl; // value-only layout for boundary evaluations
  std::span<const int> sizes;
  std::span<const S> params;
  const StencilWeightsT<S>* W;
  Coeffs<S> co;
  const CollocationSet* colloc;
  bool with_data = false;
};

template <class Ops, class S = typename Ops::Scalar>
S interior_chunk_sumsq(Assembly<Ops, S>& A, std::size_t begin,
                       std::size_t end) {
  auto& ops = A.ops;
  const TimeGrid& grid = A.colloc->grid;
  const int N = grid.steps;
  const JetLayout& L = A.li->L;
  S acc = ops.constant(0.0);
  std::vector<Jet<S>> ladder(static_cast<std::size_t>(N) + 1);
  for (std::size_t pi = begin; pi < end; ++pi) {
    const Point& x = A.colloc->interior[pi];
    InitialData init;
    const InitialData* ip = nullptr;
    if (A.pb->initial) {
      init = A.pb->initial(x);
      ip = &init;
    }
    for (int k = 0; k <= N; ++k) {
      ladder[static_cast<std::size_t>(k)] =
          trial_forward_jets(ops, L, A.sizes, A.params, x,
                             grid.nodes[static_cast<std::size_t>(k)], ip);
    }
    for (int n = 1; n <= N; ++n) {
      S r = ops.constant(
          -A.pb->forcing(x, grid.nodes[static_cast<std::size_t>(n)]));
      for (int l = 0; l < n; ++l) {
        const auto& wl = A.W->left[static_cast<std::size_t>(l)];
        const auto& wr = A.W->right[static_cast<std::size_t>(l)];
        const Jet<S>& jl = ladder[static_cast<std::size_t>(n - 1 - l)];
        const Jet<S>& jr = ladder[static_cast<std::size_t>(n - l)];
        r = ops.fma(wl[0], jl.c[0], r);
        r = ops.fma(wr[0], jr.c[0], r);
        if (A.W->dmax >= 1) {
          r = ops.fma(wl[1], jl.c[A.li->t_d1], r);
          r = ops.fma(wr[1], jr.c[A.li->t_d1], r);
        }
        if (A.W->dmax >= 2) {
          r = ops.fma(wl[2], jl.c[A.li->t_d2], r);
          r = ops.fma(wr[2], jr.c[A.li->t_d2], r);
        }
      }
      const Jet<S>& jn = ladder[static_cast<std::size_t>(n)];
      if (A.co.has_beta) {
        S lap = jn.c[L.d2pos[0]];
        for (int d = 1; d < A.pb->dim; ++d) lap = ops.add(lap, jn.c[L.d2pos[d]]);
        r = ops.sub(r, ops.mul(A.co.beta, lap));
      }
      if (A.co.has_gamma) {
        S adv = jn.c[L.d1pos[0]];
        for (int d = 1; d < A.pb->dim; ++d) adv = ops.add(adv, jn.c[L.d1pos[d]]);
        r = ops.fma(A.co.gamma, adv, r);
      }
      if (A.co.rho != 0.0) r = ops.axpy_c(jn.c[0], -A.co.rho, r);
      acc = ops.add(ops.square(r), acc);
      if (A.with_data) {
        const S diff = ops.add_c(
            jn.c[0], -A.colloc->data[pi][static_cast<std::size_t>(n - 1)]);
        acc = ops.add(ops.square(diff), acc);
      }
    }
  }
  return acc;
}

template <class Ops, class S = typename Ops::Scalar>
S boundary_chunk_sumsq(Assembly<Ops, S>& A, std::size_t begin,
                       std::size_t end) {
  auto& ops = A.ops;
  const TimeGrid& grid = A.colloc->grid;
  const int N = grid.steps;
  S acc = ops.constant(0.0);
  for (std::size_t pi = begin; pi < end; ++pi) {
    const Point& x = A.colloc->boundary[pi];
    InitialData init;
    const InitialData* ip = nullptr;
    if (A.pb->initial) {
      init = A.pb->initial(x);
      ip = &init;
    }
    for (int k = 0; k <= N; ++k) {
      const double t = grid.nodes[static_cast<std::size_t>(k)];
      const Jet<S> j = trial_forward_jets(ops, *A.bl, A.sizes, A.params, x, t, ip);
      const S diff = ops.add_c(j.c[0], -A.pb->boundary(x, t));
      acc = ops.add(ops.square(diff), acc);
    }
  }
  return acc;
}

struct ChunkTask {
  bool boundary;
  std::size_t begin, end;
};

std::vector<ChunkTask> make_chunks(const CollocationSet& colloc) {
  std::vector<ChunkTask> chunks;
  constexpr std::size_t kInteriorChunk = 4;
  constexpr std::size_t kBoundaryChunk = 16;
  for (std::size_t b = 0; b < colloc.interior.size(); b += kInteriorChunk) {
    chunks.push_back(
        {false, b, std::min(b + kInteriorChunk, colloc.interior.size())});
  }
  for (std::size_t b = 0; b < colloc.boundary.size(); b += kBoundaryChunk) {
    chunks.push_back(
        {true, b, std::min(b + kBoundaryChunk, colloc.boundary.size())});
  }
  return chunks;
}

// Everything one training objective evaluation needs.
struct ObjectiveData {
  const PDEProblem* pb = nullptr;
  const CollocationSet* colloc = nullptr;
  std::vector<int> sizes;
  LayoutInfo li;
  JetLayout bl;
  int p = 3;
  HermiteStencil stencil_const;
  bool inv_alpha = false, inv_beta = false, inv_gamma = false;
  int nparams = 0;
  int nextras = 0;
  int threads = 1;
  bool with_data = false;
  double inv_nr = 0.0, inv_nb = 0.0;
  std::vector<ChunkTask> chunks;
  std::vector<double> chunk_vals;
  std::vector<std::vector<double>> chunk_grads;
  std::vector<Tape> tapes;

  void run_chunk(Tape& tp, std::size_t ci, std::span<const double> theta) {
    tp.reset();
    const std::size_t ntheta = theta.size();
    for (std::size_t i = 0; i < ntheta; ++i) tp.leaf(theta[i]);

    TapeOps ops{&tp};
    int ei = nparams;
    Var alpha_var{};
    if (inv_alpha) alpha_var = tp.sigmoid_v(Var{ei++});
    Coeffs<Var> co;
    co.rho = pb->rho;
    co.has_beta = pb->beta != 0.0 || inv_beta;
    co.has_gamma = pb->gamma != 0.0 || inv_gamma;
    co.beta = inv_beta ? Var{ei++} : tp.constant(pb->beta);
    co.gamma = inv_gamma ? Var{ei++} : tp.constant(pb->gamma);

    StencilWeightsT<Var> W =
        inv_alpha
            ? tape_weights(tp, alpha_var, p, colloc->grid.dt, colloc->grid.steps)
            : lift_weights(ops, stencil_const);

    std::vector<Var> pvars(static_cast<std::size_t>(nparams));
    for (int i = 0; i < nparams; ++i)
      pvars[static_cast<std::size_t>(i)] = Var{i};

    Assembly<TapeOps> A{ops, pb,     &li, &bl,    sizes,
                        pvars, &W,    co,  colloc, with_data};

    const ChunkTask& task = chunks[ci];
    const Var sum = task.boundary
                        ? boundary_chunk_sumsq(A, task.begin, task.end)
                        : interior_chunk_sumsq(A, task.begin, task.end);
    const Var scaled = tp.mul_c(sum, task.boundary ? inv_nb : inv_nr);
    tp.reverse(scaled);
    chunk_vals[ci] = tp.value(scaled);
    auto& g = chunk_grads[ci];
    for (std::size_t i = 0; i < ntheta; ++i) {
      g[i] = tp.adjoint(Var{static_cast<std::int32_t>(i)});
    }
  }

  double evaluate(std::span<const double> theta, std::span<double> grad) {
    const std::size_t nchunks = chunks.size();
    std::atomic<std::size_t> next{0};
    const int nt = std::min<int>(threads, static_cast<int>(nchunks));
    auto work = [&](int tid) {
      for (;;) {
        const std::size_t ci = next.fetch_add(1);
        if (ci >= nchunks) break;
        run_chunk(tapes[static_cast<std::size_t>(tid)], ci, theta);
      }
    };
    if (nt <= 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(nt));
      for (int t = 0; t < nt; ++t) pool.emplace_back(work, t);
      for (auto& th : pool) th.join();
    }
    // Ordered reduction keeps results independent of the thread count.
    double loss = 0.0;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t ci = 0; ci < nchunks; ++ci) {
      loss += chunk_vals[ci];
      const auto& g = chunk_grads[ci];
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
    }
    return loss;
  }
};

int default_mx(const PDEProblem& pb) {
  switch (pb.dim) {
    case 0: return 1;
    case 1: return 11;
    case 2: return 11;
    case 3: return pb.id == "inv3d" ? 500 : 11;
    default: return 500;
  }
}

bool uses_lhs(const PDEProblem& pb) {
  return pb.id == "adv10d" || pb.id == "inv3d";
}

std::vector<int> default_arch(const PDEProblem& pb) {
  return {pb.dim + 1, 20, 20, 20, 20, 1};
}

ObjectiveData make_objective(const PDEProblem& pb,
                             const CollocationSet& colloc,
                             const SolveConfig& cfg, const DenseNet& net,
                             const InverseConfig* inv) {
  ObjectiveData od;
  od.pb = &pb;
  od.colloc = &colloc;
  od.sizes = net.layer_sizes;
  od.li = make_layout(pb, cfg.p);
  od.bl = JetLayout::make({}, {});
  od.p = cfg.p;
  od.stencil_const = build_stencil(cfg.p, FracOrder(pb.alpha),
                                   colloc.grid.steps, colloc.grid.dt);
  if (inv != nullptr) {
    od.inv_alpha = inv->learn_alpha;
    od.inv_beta = inv->learn_beta;
    od.inv_gamma = inv->learn_gamma;
  }
  od.nparams = net.param_count();
  od.nextras =
      (od.inv_alpha ? 1 : 0) + (od.inv_beta ? 1 : 0) + (od.inv_gamma ? 1 : 0);
  od.threads = resolve_threads(cfg.threads);
  od.with_data = !colloc.data.empty();
  const std::size_t nr =
      colloc.interior.size() * static_cast<std::size_t>(colloc.grid.steps);
  const std::size_t nb = colloc.boundary.size() *
                         static_cast<std::size_t>(colloc.grid.steps + 1);
  if (nr == 0) throw std::domain_error("solver: empty residual point set");
  od.inv_nr = 1.0 / static_cast<double>(nr);
  od.inv_nb = nb > 0 ? 1.0 / static_cast<double>(nb) : 0.0;
  od.chunks = make_chunks(colloc);
  od.chunk_vals.assign(od.chunks.size(), 0.0);
  od.chunk_grads.assign(
      od.chunks.size(),
      std::vector<double>(static_cast<std::size_t>(od.nparams + od.nextras),
                          0.0));
  od.tapes.resize(static_cast<std::size_t>(
      std::max(1, std::min(od.threads, static_cast<int>(od.chunks.size())))));
  return od;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HNS_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

JetLayout residual_layout(const PDEProblem& pb, int p) {
  return make_layout(pb, p).L;
}

CollocationSet build_collocation(const PDEProblem& pb, const SolveConfig& cfg,
                                 bool with_data) {
  if (cfg.mt < 2) throw std::invalid_argument("SolveConfig: mt >= 2");
  CollocationSet colloc(pb.t_final, cfg.mt - 1);
  const int mx = cfg.mx > 0 ? cfg.mx : default_mx(pb);
  if (pb.dim == 0) {
    colloc.interior.push_back({});
  } else if (!uses_lhs(pb)) {
    const GridSample g = sample_equidistant(pb.dim, mx);
    for (std::size_t i = 0; i < g.points.size(); ++i) {
      if (g.boundary[i]) {
        colloc.boundary.push_back(g.points[i]);
      } else {
        colloc.interior.push_back(g.points[i]);
      }
    }
    if (cfg.nb >= 0 && cfg.nb < static_cast<int>(colloc.boundary.size())) {
      // Deterministic stride subsample of the grid boundary.
      std::vector<Point> kept;
      const std::size_t total = colloc.boundary.size();
      const std::size_t want = static_cast<std::size_t>(cfg.nb);
      for (std::size_t i = 0; i < want; ++i) {
        kept.push_back(colloc.boundary[i * total / want]);
      }
      colloc.boundary = std::move(kept);
    }
  } else {
    colloc.interior = sample_lhs(pb.dim, mx, cfg.seed * 31 + 17);
    const int per_face = cfg.nb >= 0 ? cfg.nb : (pb.id == "inv3d" ? 50 : 100);
    for (int axis = 0; axis < pb.dim; ++axis) {
      for (int side = 0; side < 2; ++side) {
        if (per_face == 0) continue;
        std::vector<Point> face;
        if (pb.dim == 1) {
          face.assign(static_cast<std::size_t>(per_face), Point{});
        } else {
          face = sample_lhs(pb.dim - 1, per_face,
                            cfg.seed * 1000003 +
                                static_cast<std::uint64_t>(axis) * 2 +
                                static_cast<std::uint64_t>(side) + 101);
        }
        for (auto& f : face) {
          Point p(static_cast<std::size_t>(pb.dim));
          int k = 0;
          for (int d = 0; d < pb.dim; ++d) {
            p[static_cast<std::size_t>(d)] =
                (d == axis) ? static_cast<double>(side)
                            : f[static_cast<std::size_t>(k++)];
          }
          colloc.boundary.push_back(std::move(p));
        }
      }
    }
  }
  if (with_data) {
    colloc.data.resize(colloc.interior.size());
    for (std::size_t i = 0; i < colloc.interior.size(); ++i) {
      auto& row = colloc.data[i];
      row.resize(static_cast<std::size_t>(colloc.grid.steps));
      for (int n = 1; n <= colloc.grid.steps; ++n) {
        row[static_cast<std::size_t>(n - 1)] = pb.exact(
            colloc.interior[i], colloc.grid.nodes[static_cast<std::size_t>(n)]);
      }
    }
  }
  return colloc;
}

double trial_value(const TrialSolution& trial, std::span<const double> x,
                   double t) {
  std::vector<double> input(x.begin(), x.end());
  input.push_back(t);
  double v = t * net_value(trial.net, input);
  if (trial.initial) v += trial.initial(x).value;
  return v;
}

double residual_with_jets(const PDEProblem& pb, int p, const TimeGrid& grid,
                          std::span<const double> x, int n,
                          const JetProvider& jets) {
  if (n < 1 || n > grid.steps) {
    throw std::invalid_argument("residual_with_jets: n must be in 1..N");
  }
  const LayoutInfo li = make_layout(pb, p);
  const HermiteStencil st = build_stencil(p, FracOrder(pb.alpha), n, grid.dt);
  std::vector<Jet<double>> ladder(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    ladder[static_cast<std::size_t>(k)] = jets(x, k);
  }

  double r = -pb.forcing(x, grid.nodes[static_cast<std::size_t>(n)]);
  for (int l = 0; l < n; ++l) {
    const auto& w = st.weights[static_cast<std::size_t>(l)];
    const Jet<double>& jl = ladder[static_cast<std::size_t>(n - 1 - l)];
    const Jet<double>& jr = ladder[static_cast<std::size_t>(n - l)];
    r += w.left[0] * jl.c[0] + w.right[0] * jr.c[0];
    if (st.max_deriv() >= 1) {
      r += w.left[1] * jl.c[li.t_d1] + w.right[1] * jr.c[li.t_d1];
    }
    if (st.max_deriv() >= 2) {
      r += w.left[2] * jl.c[li.t_d2] + w.right[2] * jr.c[li.t_d2];
    }
  }
  const Jet<double>& jn = ladder[static_cast<std::size_t>(n)];
  if (pb.beta != 0.0) {
    double lap = 0.0;
    for (int d = 0; d < pb.dim; ++d) lap += jn.c[li.L.d2pos[d]];
    r -= pb.beta * lap;
  }
  if (pb.gamma != 0.0) {
    double adv = 0.0;
    for (int d = 0; d < pb.dim; ++d) adv += jn.c[li.L.d1pos[d]];
    r += pb.gamma * adv;
  }
  if (pb.rho != 0.0) r -= pb.rho * jn.c[0];
  return r;
}

double residual_at(const PDEProblem& pb, const TrialSolution& trial, int p,
                   const TimeGrid& grid, std::span<const double> x, int n) {
  const LayoutInfo li = make_layout(pb, p);
  DoubleOps ops;
  InitialData init;
  const InitialData* ip = nullptr;
  if (trial.initial) {
    init = trial.initial(x);
    ip = &init;
  }
  auto provider = [&](std::span<const double> xx, int k) {
    return trial_forward_jets(ops, li.L, trial.net.layer_sizes,
                              std::span<const double>(trial.net.params), xx,
                              grid.nodes[static_cast<std::size_t>(k)], ip);
  };
  return residual_with_jets(pb, p, grid, x, n, provider);
}

double total_loss(const PDEProblem& pb, const TrialSolution& trial, int p,
                  const CollocationSet& colloc, const CoeffOverride* coeffs) {
  const double alpha = coeffs != nullptr ? coeffs->alpha : pb.alpha;
  const double beta = coeffs != nullptr ? coeffs->beta : pb.beta;
  const double gamma = coeffs != nullptr ? coeffs->gamma : pb.gamma;

  const LayoutInfo li = make_layout(pb, p);
  const JetLayout bl = JetLayout::make({}, {});
  const HermiteStencil st =
      build_stencil(p, FracOrder(alpha), colloc.grid.steps, colloc.grid.dt);
  DoubleOps ops;
  StencilWeightsT<double> W = lift_weights(ops, st);
  Coeffs<double> co;
  co.rho = pb.rho;
  co.has_beta = beta != 0.0;
  co.has_gamma = gamma != 0.0;
  co.beta = beta;
  co.gamma = gamma;

  Assembly<DoubleOps> A{ops,
                        &pb,
                        &li,
                        &bl,
                        trial.net.layer_sizes,
                        std::span<const double>(trial.net.params),
                        &W,
                        co,
                        &colloc,
                        !colloc.data.empty()};
  const std::size_t nr =
      colloc.interior.size() * static_cast<std::size_t>(colloc.grid.steps);
  if (nr == 0) throw std::domain_error("total_loss: empty residual point set");
  double loss =
      interior_chunk_sumsq(A, 0, colloc.interior.size()) / static_cast<double>(nr);
  if (!colloc.boundary.empty()) {
    const std::size_t nb = colloc.boundary.size() *
                           static_cast<std::size_t>(colloc.grid.steps + 1);
    loss += boundary_chunk_sumsq(A, 0, colloc.boundary.size()) /
            static_cast<double>(nb);
  }
  return loss;
}

InverseLossGrad total_loss_gradient(const PDEProblem& pb,
                                    const TrialSolution& trial, int p,
                                    const CollocationSet& colloc, double alpha,
                                    double beta, double gamma) {
  Tape tp;
  const int nparams = trial.net.param_count();
  for (double v : trial.net.params) tp.leaf(v);
  const Var alpha_var = tp.leaf(alpha);
  const Var beta_var = tp.leaf(beta);
  const Var gamma_var = tp.leaf(gamma);

  TapeOps ops{&tp};
  const LayoutInfo li = make_layout(pb, p);
  const JetLayout bl = JetLayout::make({}, {});
  StencilWeightsT<Var> W =
      tape_weights(tp, alpha_var, p, colloc.grid.dt, colloc.grid.steps);
  Coeffs<Var> co;
  co.rho = pb.rho;
  co.has_beta = beta != 0.0 || pb.beta != 0.0;
  co.has_gamma = gamma != 0.0 || pb.gamma != 0.0;
  co.beta = beta_var;
  co.gamma = gamma_var;

  std::vector<Var> pvars(static_cast<std::size_t>(nparams));
  for (int i = 0; i < nparams; ++i) pvars[static_cast<std::size_t>(i)] = Var{i};
  Assembly<TapeOps> A{ops,   &pb, &li, &bl,     trial.net.layer_sizes,
                      pvars, &W,  co,  &colloc, !colloc.data.empty()};

  const std::size_t nr =
      colloc.interior.size() * static_cast<std::size_t>(colloc.grid.steps);
  if (nr == 0) throw std::domain_error("total_loss_gradient: empty residuals");
  Var loss = tp.mul_c(interior_chunk_sumsq(A, 0, colloc.interior.size()),
                      1.0 / static_cast<double>(nr));
  if (!colloc.boundary.empty()) {
    const std::size_t nb = colloc.boundary.size() *
                           static_cast<std::size_t>(colloc.grid.steps + 1);
    loss = tp.add(loss,
                  tp.mul_c(boundary_chunk_sumsq(A, 0, colloc.boundary.size()),
                           1.0 / static_cast<double>(nb)));
  }
  tp.reverse(loss);

  InverseLossGrad out;
  out.value = tp.value(loss);
  out.param_grad.resize(static_cast<std::size_t>(nparams));
  for (int i = 0; i < nparams; ++i) {
    out.param_grad[static_cast<std::size_t>(i)] = tp.adjoint(Var{i});
  }
  out.d_alpha = tp.adjoint(alpha_var);
  out.d_beta = tp.adjoint(beta_var);
  out.d_gamma = tp.adjoint(gamma_var);
  return out;
}

double test_rel_l2(const PDEProblem& pb, const TrialSolution& trial,
                   int test_points) {
  std::vector<double> pred, exact;
  if (pb.dim == 0) {
    const int n = test_points > 0 ? test_points : 1000;
    pred.reserve(static_cast<std::size_t>(n));
    exact.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double t = pb.t_final * i / (n - 1.0);
      pred.push_back(trial_value(trial, {}, t));
      exact.push_back(pb.exact({}, t));
    }
  } else if (pb.id == "tfde") {
    const int m = 100;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const std::vector<double> x{i / (m - 1.0)};
        const double t = pb.t_final * j / (m - 1.0);
        pred.push_back(trial_value(trial, x, t));
        exact.push_back(pb.exact(x, t));
      }
    }
  } else {
    const int n = test_points > 0 ? test_points : 100000;
    const auto pts = sample_lhs(pb.dim + 1, n, kTestSeed);
    for (const auto& q : pts) {
      const std::span<const double> x(q.data(),
                                      static_cast<std::size_t>(pb.dim));
      const double t = pb.t_final * q.back();
      pred.push_back(trial_value(trial, x, t));
      exact.push_back(pb.exact(x, t));
    }
  }
  return relative_l2(pred, exact);
}

std::pair<TrialSolution, SolveReport> solve_forward(const PDEProblem& pb,
                                                    const SolveConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialSolution trial;
  trial.net = init_net(cfg.seed, default_arch(pb));
  trial.initial = pb.initial;

  CollocationSet colloc = build_collocation(pb, cfg, false);
  ObjectiveData od = make_objective(pb, colloc, cfg, trial.net, nullptr);

  auto objective = [&od](std::span<const double> x, std::span<double> g) {
    return od.evaluate(x, g);
  };
  LbfgsConfig lc;
  lc.max_iters = cfg.iters;
  lc.grad_tol = cfg.grad_tol;
  const MinimizeResult mr = minimize(objective, trial.net.params, lc);
  trial.net.params.assign(mr.x.begin(), mr.x.end());

  SolveReport rep;
  rep.final_loss = mr.value;
  rep.iterations = mr.iterations;
  rep.status = mr.status;
  rep.trace = mr.trace;
  rep.rel_l2 = test_rel_l2(pb, trial, cfg.test_points);
  rep.alpha_hat = rep.beta_hat = rep.gamma_hat =
      std::numeric_limits<double>::quiet_NaN();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  return {std::move(trial), std::move(rep)};
}

std::pair<TrialSolution, SolveReport> solve_inverse(const PDEProblem& pb,
                                                    const InverseConfig& inv,
                                                    const SolveConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialSolution trial;
  trial.net = init_net(cfg.seed, default_arch(pb));
  trial.initial = pb.initial;

  CollocationSet colloc = build_collocation(pb, cfg, true);
  ObjectiveData od = make_objective(pb, colloc, cfg, trial.net, &inv);

  std::vector<double> theta = trial.net.params;
  if (inv.learn_alpha) theta.push_back(logit(inv.init_alpha));
  if (inv.learn_beta) theta.push_back(inv.init_beta);
  if (inv.learn_gamma) theta.push_back(inv.init_gamma);

  auto objective = [&od](std::span<const double> x, std::span<double> g) {
    return od.evaluate(x, g);
  };
  LbfgsConfig lc;
  lc.max_iters = cfg.iters;
  lc.grad_tol = cfg.grad_tol;
  const MinimizeResult mr = minimize(objective, theta, lc);

  trial.net.params.assign(mr.x.begin(),
                          mr.x.begin() + trial.net.param_count());
  SolveReport rep;
  rep.final_loss = mr.value;
  rep.iterations = mr.iterations;
  rep.status = mr.status;
  rep.trace = mr.trace;
  rep.alpha_hat = rep.beta_hat = rep.gamma_hat =
      std::numeric_limits<double>::quiet_NaN();
  std::size_t ei = static_cast<std::size_t>(trial.net.param_count());
  if (inv.learn_alpha) rep.alpha_hat = sigmoid(mr.x[ei++]);
  if (inv.learn_beta) rep.beta_hat = mr.x[ei++];
  if (inv.learn_gamma) rep.gamma_hat = mr.x[ei++];
  rep.rel_l2 = test_rel_l2(pb, trial, cfg.test_points);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  return {std::move(trial), std::move(rep)};
}

} // namespace hns
