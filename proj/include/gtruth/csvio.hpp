#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gtruth::csv {

// Shortest representation that round-trips exactly (std::to_chars); output is
// locale independent, which keeps re-runs byte-identical.
std::string format_double(double v);
std::string format_int(std::int64_t v);

// Full-string parses; reject trailing garbage, accept inf/nan spellings as
// produced by to_chars.
bool parse_double(std::string_view field, double& out);
bool parse_int(std::string_view field, std::int64_t& out);

std::string_view strip(std::string_view s);
std::vector<std::string_view> split_fields(std::string_view line);

struct CommentKv {
  std::string key;
  std::string value;
};

// Parses "# key=value" comment lines; returns nullopt for other comments.
std::optional<CommentKv> parse_comment_kv(std::string_view line);

struct Row {
  std::size_t line_number = 0;  // 1-based, counting every physical line
  std::string text;             // raw line with trailing CR removed
};

// Splits a CSV stream into metadata comments, the header line, and data rows.
// Blank lines are ignored. Throws ConfigError when no header is present or
// when the header does not match `expected_header` exactly.
struct Table {
  std::vector<CommentKv> metadata;
  std::string header;
  std::vector<Row> rows;
};

Table read_table(std::istream& in, std::string_view expected_header,
                 std::string_view what);

std::optional<std::string> find_meta(const Table& table, std::string_view key);

}  // namespace gtruth::csv
