#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qkdv/rate_study.hpp"

namespace qkdv {

// %.17g, with "nan", "inf" and "-inf" spelled out.
std::string format_double(double v);

// Header row, then data rows; rendered with a leading
// `# config_hash=<hex>` comment line.
class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  class Row {
   public:
    Row& operator<<(double v);
    Row& operator<<(int v);
    Row& operator<<(long v);
    Row& operator<<(unsigned long v);
    Row& operator<<(unsigned long long v);
    Row& operator<<(const std::string& v);
    Row& operator<<(const char* v);

   private:
    friend class CsvTable;
    explicit Row(std::vector<std::string>& cells) : cells_(cells) {}
    std::vector<std::string>& cells_;
  };

  // Starts a row; DimensionError at render time if its width is wrong.
  Row row();

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& cells(std::size_t r) const { return rows_[r]; }

  std::string render(std::string_view config_hash) const;
  void write(const std::filesystem::path& path, std::string_view config_hash) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Cells containing a comma, quote or newline are quoted.
std::string csv_escape(std::string_view cell);

// (param, value, norm_id, norm, fitted_slope, residual)
CsvTable rate_study_table();
void append_rate_study(CsvTable& table, const RateStudy& study);

}  // namespace qkdv
