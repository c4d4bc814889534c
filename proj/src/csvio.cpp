#include "gtruth/csvio.hpp"

#include "gtruth/core.hpp"

#include <charconv>
#include <istream>
#include <system_error>

namespace gtruth::csv {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_int(std::int64_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view field, double& out) {
  field = strip(field);
  if (field.empty()) return false;
  // from_chars does not accept a leading '+'.
  if (field.front() == '+') field.remove_prefix(1);
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc{} && res.ptr == field.data() + field.size();
}

bool parse_int(std::string_view field, std::int64_t& out) {
  field = strip(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc{} && res.ptr == field.data() + field.size();
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(strip(line.substr(start)));
      break;
    }
    out.push_back(strip(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

std::optional<CommentKv> parse_comment_kv(std::string_view line) {
  line = strip(line);
  if (line.empty() || line.front() != '#') return std::nullopt;
  line.remove_prefix(1);
  line = strip(line);
  const std::size_t eq = line.find('=');
  if (eq == std::string_view::npos) return std::nullopt;
  CommentKv kv;
  kv.key = std::string(strip(line.substr(0, eq)));
  kv.value = std::string(strip(line.substr(eq + 1)));
  if (kv.key.empty()) return std::nullopt;
  return kv;
}

Table read_table(std::istream& in, std::string_view expected_header,
                 std::string_view what) {
  Table table;
  std::string line;
  std::size_t line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view stripped = strip(line);
    if (stripped.empty()) continue;
    if (stripped.front() == '#') {
      if (auto kv = parse_comment_kv(stripped)) table.metadata.push_back(*kv);
      continue;
    }
    if (!have_header) {
      if (stripped != expected_header)
        throw ConfigError(std::string(what) + ": expected header '" +
                          std::string(expected_header) + "', got '" +
                          std::string(stripped) + "' at line " +
                          std::to_string(line_number));
      table.header = std::string(stripped);
      have_header = true;
      continue;
    }
    table.rows.push_back(Row{line_number, std::string(stripped)});
  }
  if (!have_header)
    throw ConfigError(std::string(what) + ": missing header line '" +
                      std::string(expected_header) + "'");
  return table;
}

std::optional<std::string> find_meta(const Table& table, std::string_view key) {
  for (const CommentKv& kv : table.metadata)
    if (kv.key == key) return kv.value;
  return std::nullopt;
}

}  // namespace gtruth::csv
