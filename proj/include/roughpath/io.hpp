#pragma once

// Plain-text persistence. Every number is written with 17 significant digits,
// which round-trips doubles exactly.

#include <filesystem>
#include <string>
#include <vector>

#include "roughpath/paths.hpp"

namespace rp {

std::string format_double(double x);
double parse_double(const std::string& s);

class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells);
  /// Convenience for all-numeric rows.
  void add_numeric_row(const std::vector<double>& cells);

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  std::size_t column(const std::string& name) const;

  std::string to_string() const;
  void write(const std::filesystem::path& file) const;
  static CsvTable parse(const std::string& text);
  static CsvTable read(const std::filesystem::path& file);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Columns: t, x0, ..., x{d-1}.
CsvTable grid_path_table(const GridPath& x);
GridPath grid_path_from_table(const CsvTable& t);

/// Columns: t, then one column per coefficient named L<k>_<i1>_..._<ik>
/// (row-major multi-index), levels 1..n.
CsvTable group_path_table(const GroupPath& g);
GroupPath group_path_from_table(const CsvTable& t);

std::string read_text(const std::filesystem::path& file);
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace rp
