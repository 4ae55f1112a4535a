#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semcloud::datalog {

using ExternalFn = std::function<double(std::span<const double>)>;

/// Pure numeric functions callable from rules as `@name(args)`. Functions
/// must be deterministic; they may be invoked concurrently.
class ExternalRegistry {
 public:
  struct Entry {
    std::size_t arity = 0;
    ExternalFn fn;
  };

  /// Registers or replaces `name` (given without '@').
  void add(std::string name, std::size_t arity, ExternalFn fn);

  const Entry* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::vector<std::string> names() const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace semcloud::datalog
