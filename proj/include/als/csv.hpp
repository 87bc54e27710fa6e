#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace als::csv {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Reads a comma-separated file whose first line must equal `header`.
/// Blank lines are skipped; a row with the wrong field count is a ParseError.
std::vector<Row> read(std::istream& in, std::string_view file_label, std::string_view header);
std::vector<Row> read_file(const std::string& path, std::string_view header);

std::vector<std::string> split(std::string_view line, char sep = ',');

double parse_double(const Row& row, std::size_t field, std::string_view file_label);
std::int64_t parse_int(const Row& row, std::size_t field, std::string_view file_label);

/// Shortest decimal text that parses back to exactly `v`; NaN becomes "".
std::string format_double(double v);

}  // namespace als::csv
