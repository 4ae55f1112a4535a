#include "semcloud/datalog/value.hpp"

#include <array>
#include <charconv>
#include <cctype>
#include <cmath>

#include "semcloud/errors.hpp"

namespace semcloud::datalog {

double Value::as_number() const {
  if (const auto* x = std::get_if<double>(&data_)) return *x;
  throw TypeMismatch("expected a number, got symbol '" + std::get<std::string>(data_) + "'");
}

const std::string& Value::as_symbol() const {
  if (const auto* s = std::get_if<std::string>(&data_)) return *s;
  throw TypeMismatch("expected a symbol, got number " + format_number(std::get<double>(data_)));
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) return std::to_string(x);
  return std::string(buf.data(), end);
}

bool is_bare_symbol(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  if (s == "_") return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

std::string Value::to_string() const {
  if (is_number()) return format_number(std::get<double>(data_));
  const auto& s = std::get<std::string>(data_);
  if (is_bare_symbol(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.is_number() != b.is_number()) {
    return a.is_number() ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (a.is_number()) {
    const double x = std::get<double>(a.data_);
    const double y = std::get<double>(b.data_);
    if (x < y) return std::strong_ordering::less;
    if (y < x) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  return std::get<std::string>(a.data_) <=> std::get<std::string>(b.data_);
}

}  // namespace semcloud::datalog
