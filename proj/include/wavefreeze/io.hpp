#pragma once

#include <filesystem>
#include <string>
#include <vector>

/// CSV tables and file output shared by the harness.
namespace wavefreeze::io {

/// Shortest decimal that reads back to the same double; "nan", "inf", "-inf" otherwise.
std::string format_number(double x);

/// Parses a cell written by format_number (empty cell -> NaN).
double parse_number(const std::string& cell);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // NaN is written as an empty cell

  void add_row(std::vector<double> row);
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

/// Header row, comma delimiter, LF line endings.
std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace wavefreeze::io
