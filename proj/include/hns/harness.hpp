#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace hns {

/// Flat key=value run configuration. Commands validate their key sets, so
/// misspelled keys fail loudly instead of being ignored.
class KvConfig {
 public:
  static KvConfig from_file(const std::string& path);
  static KvConfig from_args(const std::vector<std::string>& args);

  void merge(const KvConfig& other); // other wins

  bool has(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& def) const;
  std::string require_str(const std::string& key) const;
  double get_num(const std::string& key, double def) const;
  int get_int(const std::string& key, int def) const;
  std::vector<double> get_num_list(const std::string& key,
                                   const std::vector<double>& def) const;
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& def) const;

  /// Throws listing the first key outside `allowed`.
  void check_keys(const std::vector<std::string>& allowed) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

/// Full-precision text form used by every CSV column.
std::string fmt_full(double v);

/// Command entry points; each returns a process exit code and reports
/// failures on `err`.
int cmd_quad_check(const KvConfig& cfg, std::ostream& err);
int cmd_solve(const KvConfig& cfg, std::ostream& err);
int cmd_inverse(const KvConfig& cfg, std::ostream& err);
int cmd_fdm(const KvConfig& cfg, std::ostream& err);
int cmd_table(const KvConfig& cfg, std::ostream& err);

/// CLI dispatch: hns <command> [--config FILE | key=value ...].
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace hns
