#pragma once

#include <string>
#include <vector>

namespace pamexo {

/// Numeric CSV with one header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a header column; throws kParse when absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> column_values(std::size_t col) const;
};

/// Throws kIo if the file cannot be read and kParse (with the 1-based line
/// number) on malformed rows. An input without data rows is a parse error.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin = "<text>");

std::string format_number(double v);

}  // namespace pamexo
