#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cdice {

/// Column-major numeric table with named columns; written as CSV.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns);

  void add_row(const std::vector<double>& row);

  const std::vector<std::string>& columns() const { return names_; }
  std::size_t rows() const { return data_.empty() ? 0 : data_.front().size(); }
  const std::vector<double>& column(std::string_view name) const;
  bool has_column(std::string_view name) const;

  void write_csv(std::ostream& out) const;
  void save_csv(const std::string& path) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> data_;
};

/// Fixed-format text used by every CSV writer: integers print bare, other
/// values with up to 10 significant digits.
std::string format_cell(double v);

}  // namespace cdice
