#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hns/harness.hpp"

using namespace hns;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

int run(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = run_cli(args, out, err);
  if (err_text != nullptr) *err_text = err.str();
  return rc;
}

const std::string kTmp = "/tmp/hns_harness_test";

} // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("config parsing and key validation") {
  const auto cfg = KvConfig::from_args({"alpha=0.5", "mt=11"});
  CHECK(cfg.get_num("alpha", 0.0) == 0.5);
  CHECK(cfg.get_int("mt", 0) == 11);
  CHECK(cfg.get_int("p", 3) == 3);
  CHECK_THROWS_WITH_AS(cfg.check_keys({"alpha"}),
                       doctest::Contains("unknown key 'mt'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(cfg.require_str("problem"),
                       doctest::Contains("problem"), std::invalid_argument);
  CHECK_THROWS(KvConfig::from_args({"oops"}));
}

TEST_CASE("config file round trip") {
  const std::string path = kTmp + "_cfg.txt";
  {
    std::ofstream out(path);
    out << "# comment\n\nproblem=fde\nalpha=0.5\nmt_list=6,11\n";
  }
  const auto cfg = KvConfig::from_file(path);
  CHECK(cfg.require_str("problem") == "fde");
  const auto mts = cfg.get_int_list("mt_list", {});
  REQUIRE(mts.size() == 2);
  CHECK(mts[1] == 11);
  std::remove(path.c_str());
}

TEST_CASE("missing required key names the key and exits nonzero") {
  std::string err;
  const int rc = run({"solve", "p=3"}, &err);
  CHECK(rc != 0);
  CHECK(err.find("problem") != std::string::npos);
}

TEST_CASE("unknown command and unknown key are usage errors") {
  std::string err;
  CHECK(run({"frobnicate"}, &err) == 2);
  CHECK(run({"fdm", "bogus_key=1", "out=" + kTmp}, &err) == 1);
  CHECK(err.find("bogus_key") != std::string::npos);
}

TEST_CASE("fdm command writes one row per mt") {
  std::filesystem::remove_all(kTmp);
  CHECK(run({"fdm", "alpha=0.5", "mt_list=6,11,21,41", "out=" + kTmp}) == 0);
  const auto rows = parse_csv(slurp(kTmp + "/fdm.csv"));
  REQUIRE(rows.size() == 5); // header + 4
  CHECK(rows[0][0] == "mt");
  CHECK(rows[1][0] == "6");
  CHECK(rows[4][0] == "41");
}

TEST_CASE("quad-check command emits orders and kernels") {
  std::filesystem::remove_all(kTmp);
  CHECK(run({"quad-check", "alphas=0.5", "ps=1", "n_list=8,16,32",
             "out=" + kTmp}) == 0);
  const auto rows = parse_csv(slurp(kTmp + "/quad_check.csv"));
  REQUIRE(rows.size() == 4);
  const double order = std::stod(rows[1].back());
  CHECK(std::abs(order - 1.5) <= 0.2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][6] == "1"); // bound_ok
  }
  CHECK(parse_csv(slurp(kTmp + "/stencil_kernels.csv")).size() > 10);
}

TEST_CASE("solve command end to end on the smallest benchmark") {
  std::filesystem::remove_all(kTmp);
  CHECK(run({"solve", "problem=fde", "alpha=0.5", "p=3", "mt=6", "iters=50",
             "out=" + kTmp, "trace_csv=trace.csv"}) == 0);
  const auto rows = parse_csv(slurp(kTmp + "/solve_fde.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][5] == "rel_l2");
  const double rel = std::stod(rows[1][5]);
  CHECK(rel < 0.5);
  CHECK(parse_csv(slurp(kTmp + "/trace.csv")).size() > 2);
}

TEST_CASE("identical config and seed reproduce identical bytes except time") {
  auto run_once = [&](const std::string& dir) {
    std::filesystem::remove_all(dir);
    REQUIRE(run({"solve", "problem=fde", "p=1", "mt=6", "iters=25", "seed=3",
                 "out=" + dir}) == 0);
    return parse_csv(slurp(dir + "/solve_fde.csv"));
  };
  const auto a = run_once(kTmp + "_a");
  const auto b = run_once(kTmp + "_b");
  REQUIRE(a.size() == b.size());
  REQUIRE(a[1].size() == b[1].size());
  for (std::size_t i = 0; i < a[1].size(); ++i) {
    if (a[0][i] == "seconds") continue; // wall time is the excluded column
    CHECK(a[1][i] == b[1][i]);
  }
}

TEST_CASE("table command produces the desk grid") {
  std::filesystem::remove_all(kTmp);
  CHECK(run({"table", "table=1", "scale=desk", "iters=2", "out=" + kTmp}) == 0);
  const auto rows = parse_csv(slurp(kTmp + "/table1_desk.csv"));
  REQUIRE(rows.size() == 1 + 3 * 3 * 2); // alphas x mts x ps
  CHECK(rows[0].back() == "status");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].back() == "ok");
}

TEST_SUITE_END();
