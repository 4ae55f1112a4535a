#include "semcloud/etl/slicing.hpp"

#include <algorithm>
#include <map>

#include "semcloud/errors.hpp"

namespace semcloud::etl {

std::vector<Slice> slice_records(const std::vector<UnifiedRecord>& records, std::size_t nc, std::size_t ns) {
  if (ns < 1 || ns > nc) throw InvalidInput("slicing needs 1 <= ns <= nc");
  std::vector<Slice> out;
  for (std::size_t start = 0; start < records.size(); start += nc) {
    const std::size_t end = std::min(records.size(), start + nc);
    std::vector<std::string> order;
    std::map<std::string, std::vector<const UnifiedRecord*>> groups;
    for (std::size_t k = start; k < end; ++k) {
      auto& g = groups[records[k].machine_id];
      if (g.empty()) order.push_back(records[k].machine_id);
      g.push_back(&records[k]);
    }
    for (const auto& machine : order) {
      const auto& g = groups[machine];
      for (std::size_t k = 0; k < g.size(); k += ns) {
        Slice s;
        s.machine_id = machine;
        s.seq = out.size();
        for (std::size_t m = k; m < std::min(g.size(), k + ns); ++m) s.records.push_back(*g[m]);
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

}  // namespace semcloud::etl
