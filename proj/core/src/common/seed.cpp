#include "semcloud/common/seed.hpp"

#include <string>

namespace semcloud {

std::uint64_t fnv1a(std::string_view data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t sub_seed(std::uint64_t root, std::string_view stage) {
  return fnv1a(stage, fnv1a(std::to_string(root) + "/"));
}

}  // namespace semcloud
