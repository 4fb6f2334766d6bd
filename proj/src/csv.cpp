#include "agelab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace agelab::csv {

std::string format(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::string format(long value) { return std::to_string(value); }

std::string format(unsigned long long value) { return std::to_string(value); }

Writer::Writer(const std::filesystem::path& path, const std::string& schema,
               const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), arity_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
  out_ << "#schema=" << schema << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out_ << (i ? "," : "") << columns[i];
  }
  out_ << "\n";
}

void Writer::row(const std::vector<std::string>& cells) {
  if (cells.size() != arity_) {
    throw std::invalid_argument("csv row arity mismatch");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out_ << (i ? "," : "") << cells[i];
  }
  out_ << "\n";
}

int Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<double> Table::numeric_column(const std::string& name) const {
  const int index = column_index(name);
  if (index < 0) throw std::invalid_argument("missing csv column: " + name);
  std::vector<double> values;
  values.reserve(rows.size());
  for (const std::vector<std::string>& row : rows) {
    const std::string& cell = row[static_cast<std::size_t>(index)];
    values.push_back(cell == "nan" ? std::nan("") : std::stod(cell));
  }
  return values;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open csv: " + path.string());
  Table table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#schema=", 0) == 0) {
      table.schema = line.substr(8);
      continue;
    }
    if (line.front() == '#') continue;
    if (!have_header) {
      table.columns = split_row(line);
      have_header = true;
      continue;
    }
    std::vector<std::string> cells = split_row(line);
    if (cells.size() != table.columns.size()) {
      throw std::invalid_argument("csv row arity mismatch in " + path.string());
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) throw std::invalid_argument("csv has no header: " + path.string());
  return table;
}

}  // namespace agelab::csv
