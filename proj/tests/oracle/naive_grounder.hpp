#pragma once

#include "semcloud/datalog.hpp"

namespace oracle {

/// Reference evaluator used only by tests. It shares the AST with the engine
/// but nothing else: predicates are evaluated level by level (level = longest
/// dependency chain), body atoms are matched in written order against a
/// name-keyed environment, and comparisons/bindings are resolved afterwards by
/// repeated sweeps until nothing changes. Failing ground instances are dropped.
semcloud::datalog::FactSet naive_evaluate(const semcloud::datalog::Program& program,
                                          const semcloud::datalog::FactSet& edb,
                                          const semcloud::datalog::ExternalRegistry& registry);

}  // namespace oracle
