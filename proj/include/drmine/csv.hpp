#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace drmine::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF or
// LF line endings. A leading UTF-8 byte order mark is skipped.
std::vector<Row> parse(std::string_view text);
std::vector<Row> read_file(const std::filesystem::path& path);

// Quotes a field only when it contains a delimiter, quote, CR or LF, or has
// leading/trailing whitespace.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);
std::string to_string(const std::vector<Row>& rows);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

}  // namespace drmine::csv
