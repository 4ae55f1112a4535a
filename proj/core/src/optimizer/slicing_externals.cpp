#include "semcloud/optimizer/slicing_externals.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>

#include "semcloud/errors.hpp"

namespace semcloud::opt {

namespace {

class Memo {
 public:
  Memo(TimeModel model, std::function<SearchSpace(double)> space, SearchMode mode)
      : model_(std::move(model)), space_(std::move(space)), mode_(mode) {}

  // Arguments (n, v, ts, tp).
  OptResult solve(std::span<const double> a) {
    const std::array<double, 4> key{a[0], a[1], a[2], a[3]};
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const SlicingQuery q{a[1], a[0], a[2], a[3]};
    const OptResult r = optimize_slicing(model_, q, space_(q.n), mode_);
    std::lock_guard lock(mutex_);
    cache_.emplace(key, r);
    return r;
  }

 private:
  TimeModel model_;
  std::function<SearchSpace(double)> space_;
  SearchMode mode_;
  std::mutex mutex_;
  std::map<std::array<double, 4>, OptResult> cache_;
};

}  // namespace

datalog::ExternalRegistry register_slicing_externals(SlicingExternalsConfig config, datalog::ExternalRegistry base) {
  if (!config.fast) throw InvalidInput("slicing externals need a time model");
  if (!config.cloud) config.cloud = config.fast;
  if (!config.space) config.space = [](double n) { return SearchSpace::desk_default(n); };

  auto fast = std::make_shared<Memo>(config.fast, config.space, config.mode);
  auto cloud = std::make_shared<Memo>(config.cloud, config.space, config.mode);
  base.add("func_fs_1", 4, [fast](std::span<const double> a) { return fast->solve(a).nc; });
  base.add("func_fs_2", 4, [fast](std::span<const double> a) { return fast->solve(a).ns; });
  base.add("func_cs_1", 4, [cloud](std::span<const double> a) { return cloud->solve(a).nc; });
  base.add("func_cs_2", 4, [cloud](std::span<const double> a) { return cloud->solve(a).ns; });
  return base;
}

}  // namespace semcloud::opt
