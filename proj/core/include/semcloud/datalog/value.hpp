#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace semcloud::datalog {

/// A ground Datalog constant: a 64-bit float or a symbol. Numbers order
/// before symbols; symbols order lexicographically.
class Value {
 public:
  Value() : data_(0.0) {}

  static Value number(double x) { return Value(x); }
  static Value symbol(std::string name) { return Value(std::move(name)); }

  bool is_number() const noexcept { return std::holds_alternative<double>(data_); }
  bool is_symbol() const noexcept { return !is_number(); }

  /// Throws TypeMismatch when the value is a symbol.
  double as_number() const;
  /// Throws TypeMismatch when the value is a number.
  const std::string& as_symbol() const;

  /// Atom-text rendering: shortest round-trip decimal for numbers, bare
  /// identifiers where possible, double-quoted otherwise.
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b);
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

 private:
  explicit Value(double x) : data_(x) {}
  explicit Value(std::string s) : data_(std::move(s)) {}

  std::variant<double, std::string> data_;
};

using Tuple = std::vector<Value>;

/// Shortest decimal text that parses back to exactly `x`.
std::string format_number(double x);

/// True when `s` can be written without quotes in fact text.
bool is_bare_symbol(std::string_view s);

}  // namespace semcloud::datalog
