#include "qkdv/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "qkdv/error.hpp"

namespace qkdv {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::Row& CsvTable::Row::operator<<(double v) {
  cells_.push_back(format_double(v));
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(int v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(long v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(unsigned long v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(unsigned long long v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(const std::string& v) {
  cells_.push_back(v);
  return *this;
}
CsvTable::Row& CsvTable::Row::operator<<(const char* v) {
  cells_.emplace_back(v);
  return *this;
}

CsvTable::Row CsvTable::row() {
  rows_.emplace_back();
  return Row(rows_.back());
}

std::string CsvTable::render(std::string_view config_hash) const {
  std::string out = "# config_hash=" + std::string(config_hash) + "\n";
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cells[i]);
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) {
    if (r.size() != header_.size())
      throw DimensionError("CSV row has " + std::to_string(r.size()) + " cells, header has " +
                           std::to_string(header_.size()));
    line(r);
  }
  return out;
}

void CsvTable::write(const std::filesystem::path& path, std::string_view config_hash) const {
  const std::string text = render(config_hash);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
  if (!out) throw UsageError("write failed for " + path.string());
}

CsvTable rate_study_table() { return CsvTable({"param", "value", "norm_id", "norm", "fitted_slope", "residual"}); }

void append_rate_study(CsvTable& table, const RateStudy& study) {
  for (std::size_t i = 0; i < study.values.size(); ++i)
    table.row() << study.parameter << study.values[i] << study.norm_id << study.norms[i] << study.slope
                << study.residual;
}

}  // namespace qkdv
