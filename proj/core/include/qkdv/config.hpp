#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qkdv/grid.hpp"
#include "qkdv/linear.hpp"
#include "qkdv/problems.hpp"

namespace qkdv {

// Flat `key = value` text, one pair per line, `#` starts a comment.
// Later keys override earlier ones.
class Config {
 public:
  Config() = default;

  static Config parse(std::string_view text, std::string_view origin = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& values() const { return values_; }

  // Malformed values -> UsageError naming the key.
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma separated numbers.
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  // Keys outside `known` (and not starting with one of `prefixes`) -> UsageError.
  void require_known(const std::set<std::string>& known, const std::vector<std::string>& prefixes = {}) const;

  // Sorted `key = value` lines; the basis of the config hash.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hash_hex(std::uint64_t h);

struct ExperimentConfig {
  std::string subcommand;
  std::string problem = "airy";
  Params params;  // from `param.<name>` keys
  GridSpec grid;  // n_components follows the problem
  SolveConfig solve;
  std::vector<double> eps_list;
  std::vector<double> kappa_list;
  std::vector<double> cutoffs;  // Xi sweep
  std::vector<double> xis;      // WKB frequencies
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  Config source;

  // Hash of everything that determines the numbers (jobs and out_dir excluded).
  std::string config_hash() const;
};

// Reads the shared keys: problem, param.*, grid.half_length, grid.n_points,
// eps, t_final, dt, samples, integrator, eps_list, kappa_list, cutoffs, xis,
// out, seed, jobs. Subcommand specific keys are left in `source`.
ExperimentConfig experiment_from(const Config& cfg, const std::string& subcommand);

}  // namespace qkdv
