#include "semcloud/datalog/externals.hpp"

namespace semcloud::datalog {

void ExternalRegistry::add(std::string name, std::size_t arity, ExternalFn fn) {
  if (!name.empty() && name.front() == '@') name.erase(0, 1);
  entries_[std::move(name)] = Entry{arity, std::move(fn)};
}

const ExternalRegistry::Entry* ExternalRegistry::find(std::string_view name) const {
  if (!name.empty() && name.front() == '@') name.remove_prefix(1);
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> ExternalRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, entry] : entries_) out.push_back(name);
  return out;
}

}  // namespace semcloud::datalog
