#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "semcloud/datalog/ast.hpp"
#include "semcloud/datalog/externals.hpp"
#include "semcloud/datalog/fact_set.hpp"
#include "semcloud/datalog/program.hpp"

namespace semcloud::datalog {

/// A rejected ground rule instance. Rejections never abort evaluation.
struct Diagnostic {
  enum class Kind { Arithmetic, ExternalFailure, EmptyAggregate };

  Kind kind;
  std::size_t rule_index = 0;
  std::string rule_label;
  std::string message;
};

std::string to_string(Diagnostic::Kind kind);

/// Side channel filled by evaluate(): rejected instances and, per rule
/// index, the number of ground instances that reached the head.
struct EvaluationLog {
  std::vector<Diagnostic> diagnostics;
  std::vector<std::size_t> firings;

  /// Diagnostics as JSON lines.
  std::string to_json_lines() const;
};

/// Evaluates `program` bottom-up over `edb` in dependency order and returns
/// EDB ∪ IDB. Throws MissingExternal (unregistered name), SignatureMismatch
/// (arity) and TypeMismatch (arithmetic or ordering on symbols).
FactSet evaluate(const Program& program, const FactSet& edb, const ExternalRegistry& registry,
                 EvaluationLog* log = nullptr);

using Bindings = std::map<std::string, Value>;

/// Evaluates a single aggregate term under fixed outer bindings. Variables
/// of a comprehension not present in `bindings` range over `facts`.
/// Throws EmptyAggregate when a comprehension matches nothing.
double evaluate_aggregate(const Aggregate& aggregate, const Bindings& bindings, const FactSet& facts,
                          const ExternalRegistry& registry);

}  // namespace semcloud::datalog
