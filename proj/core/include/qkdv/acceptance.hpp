#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qkdv/csv.hpp"

namespace qkdv {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;  // one line, the numbers the verdict rests on
  std::vector<std::pair<std::string, double>> metrics;
  double seconds = 0.0;  // wall time; kept out of the CSVs
};

struct AcceptanceOptions {
  std::uint64_t seed = 20241016;
  std::size_t jobs = 1;
  std::size_t n_points = 512;  // base resolution of criteria 1-6
  std::vector<int> only;       // empty: all of 1-14
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  // Output file name -> CSV text. Identical options give identical bytes.
  std::map<std::string, std::string> files;
  std::string config_hash;

  bool all_pass() const;
};

std::string acceptance_config_hash(const AcceptanceOptions& opts);

// Criterion 14 reruns criteria 1-13 and compares every CSV byte for byte.
// on_result is called as each criterion finishes.
AcceptanceReport run_acceptance(const AcceptanceOptions& opts,
                                const std::function<void(const CriterionResult&)>& on_result = {});

// Writes report.files into dir.
void write_acceptance_files(const AcceptanceReport& report, const std::string& dir);

// "PASS  3  energy matrix signs  ..." style line.
std::string format_result_line(const CriterionResult& r);

}  // namespace qkdv
