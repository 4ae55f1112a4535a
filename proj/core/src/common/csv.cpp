#include "semcloud/common/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "semcloud/errors.hpp"

namespace semcloud::csv {

int Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::string escape(std::string_view field, char delimiter) {
  if (field.find_first_of(std::string{delimiter} + "\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_row(const Row& row, char delimiter) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out += delimiter;
    out += escape(row[i], delimiter);
  }
  return out;
}

namespace {

// Reads one record starting at `pos`; advances past its line terminator.
Row read_record(std::string_view text, std::size_t& pos, char delimiter) {
  Row row;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      ++pos;
      continue;
    }
    if (c == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == delimiter) {
      row.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      row.push_back(std::move(field));
      return row;
    } else {
      field += c;
    }
    ++pos;
  }
  if (quoted) throw UnreadableSource("unterminated quoted field");
  row.push_back(std::move(field));
  return row;
}

}  // namespace

Row parse_row(std::string_view line, char delimiter) {
  std::size_t pos = 0;
  return read_record(line, pos, delimiter);
}

Table parse(std::string_view text, char delimiter) {
  Table table;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    if (!have_header && text[pos] == '#') {
      const auto end = text.find('\n', pos);
      std::string_view line = text.substr(pos + 1, end == std::string_view::npos ? end : end - pos - 1);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      table.comments.emplace_back(line);
      pos = end == std::string_view::npos ? text.size() : end + 1;
      continue;
    }
    if (text[pos] == '\n' || text[pos] == '\r') {
      ++pos;
      continue;
    }
    Row row = read_record(text, pos, delimiter);
    if (!have_header) {
      table.header = std::move(row);
      have_header = true;
    } else {
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::string format(const Table& table, char delimiter) {
  std::string out;
  for (const auto& c : table.comments) out += "# " + c + "\n";
  out += format_row(table.header, delimiter) + "\n";
  for (const auto& row : table.rows) out += format_row(row, delimiter) + "\n";
  return out;
}

Table read_file(const std::string& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), delimiter);
}

void write_file(const std::string& path, const Table& table, char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << format(table, delimiter);
}

std::string number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

double to_number(std::string_view field) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
  double x = 0.0;
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
  if (ec != std::errc{} || end != field.data() + field.size() || field.empty()) {
    throw UnreadableSource("not a number: '" + std::string(field) + "'");
  }
  return x;
}

}  // namespace semcloud::csv
