#include "roughpath/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "roughpath/error.hpp"

namespace rp {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  require(!s.empty(), "empty numeric cell");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(end == s.c_str() + s.size() && errno != ERANGE, "not a number: '" + s + "'");
  return v;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  require(cells.size() == header_.size(), "csv row width does not match the header");
  rows_.push_back(std::move(cells));
}

void CsvTable::add_numeric_row(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double x : cells) s.push_back(format_double(x));
  add_row(std::move(s));
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return i;
  throw InvalidArgument("csv column not found: " + name);
}

std::string CsvTable::to_string() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& file) const { write_text(file, to_string()); }

CsvTable CsvTable::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  CsvTable t;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (first) {
      t.header_ = std::move(cells);
      first = false;
    } else {
      t.add_row(std::move(cells));
    }
  }
  require(!first, "csv input has no header");
  return t;
}

CsvTable CsvTable::read(const std::filesystem::path& file) { return parse(read_text(file)); }

CsvTable grid_path_table(const GridPath& x) {
  std::vector<std::string> h{"t"};
  for (int i = 0; i < x.dim(); ++i) h.push_back("x" + std::to_string(i));
  CsvTable t(std::move(h));
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::vector<double> row{x.times()[k]};
    for (double v : x.at(k)) row.push_back(v);
    t.add_numeric_row(row);
  }
  return t;
}

GridPath grid_path_from_table(const CsvTable& t) {
  require(t.header().size() >= 2 && t.header()[0] == "t", "path csv must start with a 't' column");
  const int d = static_cast<int>(t.header().size() - 1);
  std::vector<double> times, values;
  for (const auto& r : t.rows()) {
    times.push_back(parse_double(r[0]));
    for (std::size_t i = 1; i < r.size(); ++i) values.push_back(parse_double(r[i]));
  }
  return GridPath(std::move(times), d, std::move(values));
}

namespace {

std::string coefficient_name(int k, std::size_t flat, int d) {
  std::vector<std::size_t> digits(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    digits[static_cast<std::size_t>(i)] = flat % static_cast<std::size_t>(d);
    flat /= static_cast<std::size_t>(d);
  }
  std::string s = "L" + std::to_string(k);
  for (auto x : digits) s += "_" + std::to_string(x);
  return s;
}

}  // namespace

CsvTable group_path_table(const GroupPath& g) {
  require(g.size() >= 1, "empty group path");
  std::vector<std::string> h{"t"};
  for (int k = 1; k <= g.depth(); ++k)
    for (std::size_t c = 0; c < g[0].level_size(k); ++c) h.push_back(coefficient_name(k, c, g.dim()));
  CsvTable t(std::move(h));
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::vector<double> row{g.times()[i]};
    for (double v : g[i].coefficients()) row.push_back(v);
    t.add_numeric_row(row);
  }
  return t;
}

GroupPath group_path_from_table(const CsvTable& t) {
  const auto& h = t.header();
  require(h.size() >= 2 && h[0] == "t", "group path csv must start with a 't' column");
  int depth = 0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    require(h[i].size() >= 2 && h[i][0] == 'L', "bad coefficient column: " + h[i]);
    depth = std::max(depth, std::atoi(h[i].c_str() + 1));
  }
  std::size_t dim = 0;
  for (std::size_t i = 1; i < h.size(); ++i)
    if (std::atoi(h[i].c_str() + 1) == 1) ++dim;
  require(dim >= 1 && depth >= 1, "group path csv has no level-1 columns");
  TruncatedTensor shape(static_cast<int>(dim), depth);
  require(shape.coefficients().size() + 1 == h.size(), "group path csv has the wrong column count");
  std::vector<double> times;
  std::vector<TruncatedTensor> el;
  for (const auto& r : t.rows()) {
    times.push_back(parse_double(r[0]));
    TruncatedTensor g(static_cast<int>(dim), depth);
    auto c = g.coefficients();
    for (std::size_t i = 1; i < r.size(); ++i) c[i - 1] = parse_double(r[i]);
    el.push_back(std::move(g));
  }
  return GroupPath(std::move(times), std::move(el));
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + file.string());
  out << text;
}

}  // namespace rp
