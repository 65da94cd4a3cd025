#pragma once

// CSV emission: '.' decimal separator, '\n' line endings, doubles with 17
// significant digits so every value reads back exactly.

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace detmodes {

/// Shortest "%.17g" rendering; non-finite values print as nan, inf, -inf.
std::string format_number(double value);

using CsvCell = std::variant<double, std::int64_t, std::string>;

class CsvWriter {
 public:
  /// Writes the header row immediately. Column names carry their units,
  /// e.g. "t[time]".
  CsvWriter(std::ostream& out, std::vector<std::string> columns);

  /// Throws std::invalid_argument when the cell count differs from the header.
  void row(const std::vector<CsvCell>& cells);

  std::size_t columns() const { return columns_; }

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace detmodes
