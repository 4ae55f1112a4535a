#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "semcloud/datalog/ast.hpp"
#include "semcloud/datalog/fact_set.hpp"

namespace semcloud::datalog {

/// A validated, non-recursive program: every rule is safe and the predicate
/// dependency graph is acyclic.
class Program {
 public:
  /// Throws SafetyError or RecursionError.
  explicit Program(std::vector<Rule> rules);

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  /// External names used anywhere in the program, sorted, without '@'.
  const std::vector<std::string>& externals() const noexcept { return externals_; }
  /// Head predicates in a topological order of the dependency graph.
  const std::vector<PredicateKey>& strata() const noexcept { return strata_; }

  friend bool operator==(const Program& a, const Program& b) { return a.rules_ == b.rules_; }

 private:
  std::vector<Rule> rules_;
  std::vector<std::string> externals_;
  std::vector<PredicateKey> strata_;
};

/// Parses rule text: `[label:] head <- body.` with `<-`, `:-` or `←`.
/// The final rule may omit its '.'. Throws SyntaxError, SafetyError,
/// RecursionError.
Program parse_program(std::string_view text);

std::string print_term(const Term& term);
std::string print_atom(const Atom& atom);
std::string print_rule(const Rule& rule);
std::string print_program(const Program& program);

}  // namespace semcloud::datalog
