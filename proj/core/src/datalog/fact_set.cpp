#include "semcloud/datalog/fact_set.hpp"

namespace semcloud::datalog {

bool FactSet::insert(std::string_view predicate, Tuple tuple) {
  PredicateKey key{std::string(predicate), tuple.size()};
  const bool added = relations_[std::move(key)].insert(std::move(tuple)).second;
  if (added) ++size_;
  return added;
}

bool FactSet::contains(std::string_view predicate, const Tuple& tuple) const {
  const Relation* rel = find(predicate, tuple.size());
  return rel != nullptr && rel->contains(tuple);
}

const FactSet::Relation* FactSet::find(std::string_view predicate, std::size_t arity) const {
  auto it = relations_.find(PredicateKey{std::string(predicate), arity});
  return it == relations_.end() ? nullptr : &it->second;
}

void FactSet::merge(const FactSet& other) {
  for (const auto& [key, rel] : other.relations_) {
    for (const auto& tuple : rel) insert(key.name, tuple);
  }
}

std::string format_atom(std::string_view predicate, const Tuple& tuple) {
  std::string out(predicate);
  out.push_back('(');
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i != 0) out.push_back(',');
    out += tuple[i].to_string();
  }
  out.push_back(')');
  return out;
}

std::string FactSet::to_text() const {
  std::string out;
  for (const auto& [key, rel] : relations_) {
    for (const auto& tuple : rel) {
      out += format_atom(key.name, tuple);
      out += ".\n";
    }
  }
  return out;
}

std::vector<Tuple> query(const FactSet& facts, std::string_view predicate, std::size_t arity) {
  const FactSet::Relation* rel = facts.find(predicate, arity);
  if (rel == nullptr) return {};
  return {rel->begin(), rel->end()};
}

}  // namespace semcloud::datalog
