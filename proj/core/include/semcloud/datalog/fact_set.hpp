#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "semcloud/datalog/value.hpp"

namespace semcloud::datalog {

struct PredicateKey {
  std::string name;
  std::size_t arity = 0;

  friend auto operator<=>(const PredicateKey&, const PredicateKey&) = default;
};

/// Ground atoms indexed by predicate name and arity, with set semantics.
class FactSet {
 public:
  using Relation = std::set<Tuple>;

  /// Returns true when the atom was not already present.
  bool insert(std::string_view predicate, Tuple tuple);
  bool contains(std::string_view predicate, const Tuple& tuple) const;

  /// Relation for (name, arity), or nullptr when nothing is stored.
  const Relation* find(std::string_view predicate, std::size_t arity) const;

  void merge(const FactSet& other);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  const std::map<PredicateKey, Relation>& relations() const noexcept { return relations_; }

  /// One atom per line, predicates and tuples in lexicographic order.
  std::string to_text() const;

  friend bool operator==(const FactSet& a, const FactSet& b) { return a.relations_ == b.relations_; }

 private:
  std::map<PredicateKey, Relation> relations_;
  std::size_t size_ = 0;
};

/// All tuples of predicate/arity in lexicographic order; empty when absent.
std::vector<Tuple> query(const FactSet& facts, std::string_view predicate, std::size_t arity);

/// Parses atom-per-line text (`pred(a,1.5,"x y")`, optional trailing '.',
/// `%` comments). Bare identifiers are symbols. Throws SyntaxError.
FactSet parse_facts(std::string_view text);

std::string format_atom(std::string_view predicate, const Tuple& tuple);

}  // namespace semcloud::datalog
