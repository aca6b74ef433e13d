#pragma once

#include <charconv>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sivae::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index by name, or -1.
  int column(std::string_view name) const;
};

/// Parses a comma-separated numeric table with a header line. Decimal point
/// is always '.', independent of the global locale.
Table read(std::istream& in);
Table read_file(const std::string& path);

std::vector<std::string> split(std::string_view line, char sep = ',');

/// Shortest round-trip representation of a double.
std::string format(double v);

double parse_double(std::string_view field);

}  // namespace sivae::csv
