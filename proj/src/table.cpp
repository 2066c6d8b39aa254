#include "cdice/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "cdice/errors.hpp"

namespace cdice {

Table::Table(std::vector<std::string> columns)
    : names_(std::move(columns)), data_(names_.size()) {}

void Table::add_row(const std::vector<double>& row) {
  if (row.size() != names_.size()) throw ValidationError("table: row width does not match columns");
  for (std::size_t i = 0; i < row.size(); ++i) data_[i].push_back(row[i]);
}

bool Table::has_column(std::string_view name) const {
  for (const auto& n : names_) {
    if (n == name) return true;
  }
  return false;
}

const std::vector<double>& Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return data_[i];
  }
  throw ValidationError("table: no column '" + std::string(name) + "'");
}

std::string format_cell(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  if (std::abs(v) < 1e15 && v == std::round(v)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < names_.size(); ++i) out << (i ? "," : "") << names_[i];
  out << '\n';
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t i = 0; i < names_.size(); ++i) out << (i ? "," : "") << format_cell(data_[i][r]);
    out << '\n';
  }
}

void Table::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  write_csv(out);
}

}  // namespace cdice
