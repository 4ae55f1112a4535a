#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace semcloud::csv {

using Row = std::vector<std::string>;

/// A delimited table with a header row. Lines starting with '#' before the
/// header are kept as comments.
struct Table {
  std::vector<std::string> comments;
  Row header;
  std::vector<Row> rows;

  /// Column index of `name`, or -1.
  int column(std::string_view name) const;
};

/// RFC 4180 style: fields containing the delimiter, quotes or newlines are
/// quoted and inner quotes doubled.
std::string escape(std::string_view field, char delimiter = ',');
std::string format_row(const Row& row, char delimiter = ',');

/// Splits one logical record. Throws UnreadableSource on an unterminated quote.
Row parse_row(std::string_view line, char delimiter = ',');

/// Reads a whole table. Quoted fields may span lines.
Table parse(std::string_view text, char delimiter = ',');
std::string format(const Table& table, char delimiter = ',');

Table read_file(const std::string& path, char delimiter = ',');
void write_file(const std::string& path, const Table& table, char delimiter = ',');

/// Shortest round-trip text of a double ("0" for zero).
std::string number(double x);
/// Parses a full-field double; throws UnreadableSource on junk.
double to_number(std::string_view field);

}  // namespace semcloud::csv
