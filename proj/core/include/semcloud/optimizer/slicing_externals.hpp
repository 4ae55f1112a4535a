#pragma once

#include <functional>
#include <optional>

#include "semcloud/datalog/externals.hpp"
#include "semcloud/optimizer/optimizer.hpp"

namespace semcloud::opt {

struct SlicingExternalsConfig {
  TimeModel fast;
  /// Used by func_cs_1/func_cs_2; falls back to `fast` when empty.
  TimeModel cloud;
  /// Grid per data size; defaults to SearchSpace::desk_default.
  std::function<SearchSpace(double n)> space;
  SearchMode mode = SearchMode::Exhaustive;
};

/// Adds func_fs_1/func_fs_2 (nc*, ns* under fast storage) and func_cs_1/
/// func_cs_2 (cloud storage), all with arguments (n, v, ts, tp). Results are
/// memoized per argument tuple, so both halves of a pair agree.
datalog::ExternalRegistry register_slicing_externals(SlicingExternalsConfig config,
                                                     datalog::ExternalRegistry base = {});

}  // namespace semcloud::opt
