#pragma once

#include <cstdint>
#include <string_view>

namespace semcloud {

/// 64-bit FNV-1a over `data`, continuing from `basis`.
std::uint64_t fnv1a(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Stable per-stage seed derived from the project root seed.
std::uint64_t sub_seed(std::uint64_t root, std::string_view stage);

}  // namespace semcloud
