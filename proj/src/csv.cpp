#include "als/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "als/error.hpp"

namespace als::csv {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

namespace {

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<Row> read(std::istream& in, std::string_view file_label, std::string_view header) {
  const std::string label(file_label);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(label, 1, "empty file, expected header '" + std::string(header) + "'");
  ++line_no;
  std::string_view head = strip_cr(line);
  // Tolerate a UTF-8 byte order mark.
  if (head.size() >= 3 && head.substr(0, 3) == "\xEF\xBB\xBF") head.remove_prefix(3);
  if (head != header) {
    throw ParseError(label, line_no, "unexpected header '" + std::string(head) + "', expected '" + std::string(header) + "'");
  }
  const std::size_t width = split(header).size();
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = strip_cr(line);
    if (body.empty()) continue;
    Row row{line_no, split(body)};
    if (row.fields.size() != width) {
      throw ParseError(label, line_no, "expected " + std::to_string(width) + " fields, got " +
                                           std::to_string(row.fields.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Row> read_file(const std::string& path, std::string_view header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  return read(in, path, header);
}

double parse_double(const Row& row, std::size_t field, std::string_view file_label) {
  const std::string& s = row.fields.at(field);
  if (s.empty()) return std::nan("");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string(file_label), row.line, "field " + std::to_string(field + 1) + ": not a number: '" + s + "'");
  }
  return v;
}

std::int64_t parse_int(const Row& row, std::size_t field, std::string_view file_label) {
  const std::string& s = row.fields.at(field);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string(file_label), row.line, "field " + std::to_string(field + 1) + ": not an integer: '" + s + "'");
  }
  return v;
}

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return {};
  return std::string(buf, ptr);
}

}  // namespace als::csv
