#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace agelab::csv {

// Deterministic cell formatting: fixed '%.12g', 'nan' for NaN, no locale.
std::string format(double value);
std::string format(long value);
std::string format(unsigned long long value);

// Comma-separated writer with a leading "#schema=<name>" line, then the
// column header. Cells are written verbatim; callers format numbers through
// format() so identical data yields identical bytes.
class Writer {
 public:
  Writer(const std::filesystem::path& path, const std::string& schema,
         const std::vector<std::string>& columns);

  void row(const std::vector<std::string>& cells);  // throws on arity mismatch

 private:
  std::ofstream out_;
  std::size_t arity_;
};

struct Table {
  std::string schema;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;  // -1 when absent
  // Parses one column as doubles; throws std::invalid_argument when missing.
  std::vector<double> numeric_column(const std::string& name) const;
};

Table read(const std::filesystem::path& path);

}  // namespace agelab::csv
