#include "hns/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hns/caputo.hpp"
#include "hns/fdm.hpp"
#include "hns/solver.hpp"
#include "hns/special.hpp"

namespace hns {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  std::size_t e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

void put_kv(std::map<std::string, std::string>& kv, const std::string& token,
            const std::string& where) {
  const std::size_t eq = token.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("config: malformed entry '" + token + "' in " +
                                where + " (expected key=value)");
  }
  kv[trim(token.substr(0, eq))] = trim(token.substr(eq + 1));
}

std::ofstream open_csv(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  return out;
}

// Exact nodal data for u(t) = t^q.
ScalarField1D monomial_field(double q, int n, double dt, int dmax) {
  ScalarField1D f;
  f.values.resize(static_cast<std::size_t>(n) + 1);
  if (dmax >= 1) f.d1.resize(f.values.size());
  if (dmax >= 2) f.d2.resize(f.values.size());
  for (int k = 0; k <= n; ++k) {
    const double t = k * dt;
    f.values[static_cast<std::size_t>(k)] = std::pow(t, q);
    if (dmax >= 1) {
      f.d1[static_cast<std::size_t>(k)] = q * (t == 0.0 && q <= 1.0 ? (q == 1.0 ? 1.0 : 0.0) : std::pow(t, q - 1.0));
    }
    if (dmax >= 2) {
      const double c = q * (q - 1.0);
      f.d2[static_cast<std::size_t>(k)] = c == 0.0 ? 0.0 : c * std::pow(t, q - 2.0);
    }
  }
  return f;
}

SolveConfig solve_config_from(const KvConfig& cfg) {
  SolveConfig sc;
  sc.p = cfg.get_int("p", 3);
  sc.mt = cfg.get_int("mt", 11);
  sc.mx = cfg.get_int("mx", 0);
  sc.nb = cfg.get_int("nb", -1);
  sc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  sc.iters = cfg.get_int("iters", 3000);
  sc.grad_tol = cfg.get_num("grad_tol", 1e-10);
  sc.test_points = cfg.get_int("test_points", 0);
  sc.threads = cfg.get_int("threads", 0);
  if (sc.p != 1 && sc.p != 3 && sc.p != 5) {
    throw std::invalid_argument("config: p must be 1, 3, or 5");
  }
  return sc;
}

void write_trace(const std::string& path, const SolveReport& rep) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file " + path);
  out << "iter,loss,grad_norm\n";
  for (const auto& tp : rep.trace) {
    out << tp.iter << ',' << fmt_full(tp.loss) << ',' << fmt_full(tp.grad_norm)
        << '\n';
  }
}

const char* kReportHeader =
    "problem,alpha,p,mt,mx,rel_l2,final_loss,iters,seconds\n";

void write_report_row(std::ostream& out, const std::string& problem,
                      double alpha, const SolveConfig& sc,
                      const SolveReport& rep) {
  out << problem << ',' << fmt_full(alpha) << ',' << sc.p << ',' << sc.mt
      << ',' << sc.mx << ',' << fmt_full(rep.rel_l2) << ','
      << fmt_full(rep.final_loss) << ',' << rep.iterations << ','
      << fmt_full(rep.seconds) << '\n';
}

} // namespace

KvConfig KvConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  KvConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    put_kv(cfg.kv_, t, path);
  }
  return cfg;
}

KvConfig KvConfig::from_args(const std::vector<std::string>& args) {
  KvConfig cfg;
  for (const auto& a : args) put_kv(cfg.kv_, a, "command line");
  return cfg;
}

void KvConfig::merge(const KvConfig& other) {
  for (const auto& [k, v] : other.kv_) kv_[k] = v;
}

bool KvConfig::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string KvConfig::get_str(const std::string& key,
                              const std::string& def) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? def : it->second;
}

std::string KvConfig::require_str(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) {
    throw std::invalid_argument("config: missing required key '" + key + "'");
  }
  return it->second;
}

double KvConfig::get_num(const std::string& key, double def) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  std::size_t pos = 0;
  const double v = std::stod(it->second, &pos);
  if (pos != it->second.size()) {
    throw std::invalid_argument("config: key '" + key + "' is not a number: " +
                                it->second);
  }
  return v;
}

int KvConfig::get_int(const std::string& key, int def) const {
  const double v = get_num(key, def);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw std::invalid_argument("config: key '" + key + "' must be an integer");
  }
  return i;
}

std::vector<double> KvConfig::get_num_list(
    const std::string& key, const std::vector<double>& def) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  std::vector<double> out;
  for (const auto& tok : split(it->second, ',')) {
    out.push_back(std::stod(trim(tok)));
  }
  return out;
}

std::vector<int> KvConfig::get_int_list(const std::string& key,
                                        const std::vector<int>& def) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  std::vector<int> out;
  for (const auto& tok : split(it->second, ',')) {
    out.push_back(std::stoi(trim(tok)));
  }
  return out;
}

void KvConfig::check_keys(const std::vector<std::string>& allowed) const {
  for (const auto& [k, v] : kv_) {
    bool ok = false;
    for (const auto& a : allowed) {
      if (k == a) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::invalid_argument("config: unknown key '" + k + "'");
    }
  }
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_quad_check(const KvConfig& cfg, std::ostream& err) {
  cfg.check_keys({"alphas", "ps", "n_list", "out"});
  const auto alphas = cfg.get_num_list("alphas", {0.3, 0.5, 0.7});
  const auto ps = cfg.get_int_list("ps", {1, 3, 5});
  const auto n_list = cfg.get_int_list("n_list", {8, 16, 32, 64, 128});
  const std::string out_dir = cfg.get_str("out", ".");
  (void)err;

  auto out = open_csv(out_dir, "quad_check.csv");
  out << "alpha,p,n,dt,error,bound,bound_ok,oracle_gap,order\n";
  for (double a : alphas) {
    for (int p : ps) {
      const double q = p + 1.0;
      double fact = 1.0;
      for (int i = 2; i <= p + 1; ++i) fact *= i;
      std::vector<double> dts, errs, bounds, gaps;
      for (int n : n_list) {
        const double dt = 1.0 / n;
        const auto st = build_stencil(p, FracOrder(a), n, dt);
        const auto f = monomial_field(q, n, dt, (p - 1) / 2);
        const double got = apply_stencil(st, f);
        const double ref = caputo_monomial(q, FracOrder(a), 1.0);
        auto uprime = [q](double tau) { return q * std::pow(tau, q - 1.0); };
        const double orc = caputo_oracle(uprime, FracOrder(a), 1.0, 1e-10);
        dts.push_back(dt);
        errs.push_back(std::abs(got - ref));
        bounds.push_back(error_bound(p, FracOrder(a), dt, fact));
        gaps.push_back(std::abs(ref - orc));
      }
      const double order = estimate_order(dts, errs);
      for (std::size_t i = 0; i < dts.size(); ++i) {
        out << fmt_full(a) << ',' << p << ',' << n_list[i] << ','
            << fmt_full(dts[i]) << ',' << fmt_full(errs[i]) << ','
            << fmt_full(bounds[i]) << ',' << (errs[i] <= bounds[i] ? 1 : 0)
            << ',' << fmt_full(gaps[i]) << ',' << fmt_full(order) << '\n';
      }
    }
  }

  // Dimensionless per-node kernels for regression diffing.
  auto kout = open_csv(out_dir, "stencil_kernels.csv");
  kout << "p,alpha,lag,d,kernel_weight\n";
  for (double a : alphas) {
    for (int p : ps) {
      const int n = *std::max_element(n_list.begin(), n_list.end());
      for (const auto& row : kernel_dump(p, FracOrder(a), std::min(n, 32))) {
        kout << row.p << ',' << fmt_full(row.alpha) << ',' << row.lag << ','
             << row.d << ',' << fmt_full(row.kernel) << '\n';
      }
    }
  }
  return 0;
}

int cmd_fdm(const KvConfig& cfg, std::ostream& err) {
  cfg.check_keys({"alpha", "mt_list", "out"});
  const double alpha = cfg.get_num("alpha", 0.5);
  const auto mt_list = cfg.get_int_list("mt_list", {6, 11, 21, 41});
  const std::string out_dir = cfg.get_str("out", ".");
  (void)err;
  auto out = open_csv(out_dir, "fdm.csv");
  out << "mt,rel_l2\n";
  for (int mt : mt_list) {
    out << mt << ',' << fmt_full(fdm_benchmark_error(alpha, mt)) << '\n';
  }
  return 0;
}

int cmd_solve(const KvConfig& cfg, std::ostream& err) {
  cfg.check_keys({"problem", "alpha", "p", "mt", "mx", "nb", "seed", "iters",
                  "grad_tol", "test_points", "threads", "out", "out_csv",
                  "trace_csv"});
  const std::string id = cfg.require_str("problem");
  const double alpha = cfg.get_num("alpha", -1.0);
  const SolveConfig sc = solve_config_from(cfg);
  const PDEProblem pb = make_problem(id, alpha);
  (void)err;

  auto [trial, rep] = solve_forward(pb, sc);

  const std::string out_dir = cfg.get_str("out", ".");
  const std::string name = cfg.get_str("out_csv", "solve_" + id + ".csv");
  auto out = open_csv(out_dir, name);
  out << kReportHeader;
  write_report_row(out, id, pb.alpha, sc, rep);
  if (cfg.has("trace_csv")) {
    std::filesystem::create_directories(out_dir);
    write_trace(out_dir + "/" + cfg.get_str("trace_csv", ""), rep);
  }
  return 0;
}

int cmd_inverse(const KvConfig& cfg, std::ostream& err) {
  cfg.check_keys({"problem", "alpha", "p", "mt", "mx", "nb", "seed", "iters",
                  "grad_tol", "test_points", "threads", "out", "out_csv",
                  "trace_csv", "unknowns", "init_alpha", "init_beta",
                  "init_gamma"});
  const std::string id = cfg.get_str("problem", "inv3d");
  const double alpha = cfg.get_num("alpha", -1.0);
  SolveConfig sc = solve_config_from(cfg);
  const PDEProblem pb = make_problem(id, alpha);
  (void)err;

  InverseConfig inv;
  const std::string unknowns = cfg.get_str("unknowns", "alpha");
  for (const auto& u : split(unknowns, ',')) {
    const std::string t = trim(u);
    if (t == "alpha") {
      inv.learn_alpha = true;
    } else if (t == "beta") {
      inv.learn_beta = true;
    } else if (t == "gamma") {
      inv.learn_gamma = true;
    } else {
      throw std::invalid_argument("config: unknowns entry '" + t +
                                  "' (expected alpha, beta, gamma)");
    }
  }
  inv.init_alpha = cfg.get_num("init_alpha", 0.2);
  inv.init_beta = cfg.get_num("init_beta", 0.2);
  inv.init_gamma = cfg.get_num("init_gamma", 0.2);

  auto [trial, rep] = solve_inverse(pb, inv, sc);

  const std::string out_dir = cfg.get_str("out", ".");
  const std::string name = cfg.get_str("out_csv", "inverse_" + id + ".csv");
  auto out = open_csv(out_dir, name);
  out << "problem,alpha,p,mt,mx,alpha_hat,alpha_err,beta_hat,beta_err,"
         "gamma_hat,gamma_err,rel_l2,final_loss,iters,seconds\n";
  auto err_of = [](double hat, double truth) {
    return std::isnan(hat) ? std::nan("") : std::abs(hat - truth);
  };
  out << id << ',' << fmt_full(pb.alpha) << ',' << sc.p << ',' << sc.mt << ','
      << sc.mx << ',' << fmt_full(rep.alpha_hat) << ','
      << fmt_full(err_of(rep.alpha_hat, pb.alpha)) << ','
      << fmt_full(rep.beta_hat) << ',' << fmt_full(err_of(rep.beta_hat, pb.beta))
      << ',' << fmt_full(rep.gamma_hat) << ','
      << fmt_full(err_of(rep.gamma_hat, pb.gamma)) << ','
      << fmt_full(rep.rel_l2) << ',' << fmt_full(rep.final_loss) << ','
      << rep.iterations << ',' << fmt_full(rep.seconds) << '\n';
  if (cfg.has("trace_csv")) {
    write_trace(out_dir + "/" + cfg.get_str("trace_csv", ""), rep);
  }
  return 0;
}

namespace {

struct TableCell {
  std::string problem;
  double alpha;
  int p;
  int mt;
  int mx;
  bool inverse;
  std::string unknowns;
};

std::vector<TableCell> table_cells(int table, bool desk) {
  std::vector<TableCell> cells;
  auto push_grid = [&](const std::string& id, std::vector<double> alphas,
                       std::vector<int> mts, std::vector<int> ps, int mx) {
    for (double a : alphas) {
      for (int mt : mts) {
        for (int p : ps) cells.push_back({id, a, p, mt, mx, false, ""});
      }
    }
  };
  switch (table) {
    case 1:
      if (desk) {
        push_grid("fde", {0.3, 0.5, 0.7}, {6, 11, 21}, {1, 3}, 0);
      } else {
        push_grid("fde", {0.3, 0.5, 0.7}, {6, 11, 21, 41, 81, 101}, {1, 3, 5}, 0);
      }
      break;
    case 2:
      if (desk) {
        push_grid("tfde", {0.45, 0.65, 0.85}, {6, 11, 21}, {1, 3}, 11);
      } else {
        push_grid("tfde", {0.45, 0.65, 0.85}, {6, 11, 21, 41, 61, 81, 101},
                  {1, 3, 5}, 11);
      }
      break;
    case 3:
      if (desk) {
        push_grid("tfade2d", {0.7, 0.8, 0.9}, {6, 11}, {1, 3}, 11);
      } else {
        push_grid("tfade2d", {0.7, 0.8, 0.9}, {6, 11, 21, 41, 81}, {1, 3, 5}, 11);
      }
      break;
    case 4:
      if (desk) {
        push_grid("fpde3d", {0.5}, {3, 6}, {1, 3}, 5);
      } else {
        push_grid("fpde3d", {0.5}, {3, 6, 11, 21}, {1, 3, 5}, 11);
      }
      break;
    case 5:
      if (desk) {
        push_grid("adv10d", {0.5}, {6}, {1, 3}, 500);
      } else {
        push_grid("adv10d", {0.5}, {6, 11, 21}, {1, 3}, 5000);
      }
      break;
    case 6:
      for (int p : {1, 3}) {
        cells.push_back({"inv3d", 0.5, p, 6, desk ? 500 : 1000, true, "alpha"});
      }
      break;
    case 7:
      for (int p : {1, 3}) {
        cells.push_back(
            {"inv3d", 0.5, p, 6, desk ? 500 : 1000, true, "alpha,beta,gamma"});
      }
      break;
    default:
      throw std::invalid_argument("config: table must be 1..7");
  }
  return cells;
}

} // namespace

int cmd_table(const KvConfig& cfg, std::ostream& err) {
  cfg.check_keys({"table", "scale", "out", "seed", "iters", "grad_tol",
                  "threads", "test_points"});
  const int table = cfg.get_int("table", 0);
  const std::string scale = cfg.get_str("scale", "desk");
  if (scale != "desk" && scale != "full") {
    throw std::invalid_argument("config: scale must be desk or full");
  }
  const auto cells = table_cells(table, scale == "desk");
  const std::string out_dir = cfg.get_str("out", ".");
  auto out = open_csv(out_dir, "table" + std::to_string(table) + "_" + scale +
                                   ".csv");
  out << "problem,alpha,p,mt,mx,alpha_hat,alpha_err,beta_hat,beta_err,"
         "gamma_hat,gamma_err,rel_l2,final_loss,iters,seconds,status\n";

  const int base_seed = cfg.get_int("seed", 0);
  int cell_index = 0;
  for (const auto& cell : cells) {
    SolveConfig sc;
    sc.p = cell.p;
    sc.mt = cell.mt;
    sc.mx = cell.mx;
    sc.seed = static_cast<std::uint64_t>(base_seed + cell_index);
    sc.iters = cfg.get_int("iters", 3000);
    sc.grad_tol = cfg.get_num("grad_tol", 1e-10);
    sc.threads = cfg.get_int("threads", 0);
    sc.test_points = cfg.get_int("test_points", 0);
    ++cell_index;

    std::string status = "ok";
    SolveReport rep;
    PDEProblem pb;
    try {
      pb = make_problem(cell.problem, cell.alpha);
      if (cell.inverse) {
        InverseConfig inv;
        inv.learn_alpha = cell.unknowns.find("alpha") != std::string::npos;
        inv.learn_beta = cell.unknowns.find("beta") != std::string::npos;
        inv.learn_gamma = cell.unknowns.find("gamma") != std::string::npos;
        rep = solve_inverse(pb, inv, sc).second;
      } else {
        rep = solve_forward(pb, sc).second;
      }
    } catch (const std::exception& e) {
      status = std::string("error: ") + e.what();
      err << "table cell " << cell.problem << " p=" << cell.p
          << " mt=" << cell.mt << " failed: " << e.what() << "\n";
    }
    auto err_of = [](double hat, double truth) {
      return std::isnan(hat) ? std::nan("") : std::abs(hat - truth);
    };
    out << cell.problem << ',' << fmt_full(cell.alpha) << ',' << cell.p << ','
        << cell.mt << ',' << cell.mx << ',' << fmt_full(rep.alpha_hat) << ','
        << fmt_full(err_of(rep.alpha_hat, cell.alpha)) << ','
        << fmt_full(rep.beta_hat) << ',' << fmt_full(err_of(rep.beta_hat, 1.0))
        << ',' << fmt_full(rep.gamma_hat) << ','
        << fmt_full(err_of(rep.gamma_hat, 1.0)) << ',' << fmt_full(rep.rel_l2)
        << ',' << fmt_full(rep.final_loss) << ',' << rep.iterations << ','
        << fmt_full(rep.seconds) << ',' << status << '\n';
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  const std::string usage =
      "usage: hns <quad-check|solve|inverse|fdm|table> "
      "[--config FILE | key=value ...]\n";
  if (args.empty()) {
    err << usage;
    return 2;
  }
  const std::string command = args[0];
  KvConfig cfg;
  try {
    std::vector<std::string> kvs;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i] == "--config") {
        if (i + 1 >= args.size()) {
          err << "hns: --config requires a file path\n";
          return 2;
        }
        cfg.merge(KvConfig::from_file(args[++i]));
      } else {
        kvs.push_back(args[i]);
      }
    }
    cfg.merge(KvConfig::from_args(kvs));

    if (command == "quad-check") return cmd_quad_check(cfg, err);
    if (command == "solve") return cmd_solve(cfg, err);
    if (command == "inverse") return cmd_inverse(cfg, err);
    if (command == "fdm") return cmd_fdm(cfg, err);
    if (command == "table") return cmd_table(cfg, err);
    err << "hns: unknown command '" << command << "'\n" << usage;
    return 2;
  } catch (const std::exception& e) {
    err << "hns " << command << ": " << e.what() << "\n";
    return 1;
  }
  (void)out;
}

} // namespace hns
