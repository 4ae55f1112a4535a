#include <cmath>

#include "semcloud/errors.hpp"
#include "semcloud/optimizer/optimizer.hpp"

namespace semcloud::opt {

std::vector<double> Axis::values() const {
  if (steps < 1) throw InvalidInput("axis needs at least one step");
  if (!(lo > 0) || !(hi >= lo)) throw InvalidInput("axis bounds must satisfy 0 < lo <= hi");
  std::vector<double> out;
  if (steps == 1) return {hi};
  for (int k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) / (steps - 1);
    out.push_back(geometric ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  out.back() = hi;
  return out;
}

SearchSpace SearchSpace::desk_default(double n, int steps, double span) {
  SearchSpace s;
  s.n = n;
  s.nc = Axis{std::max(1.0, n / span), std::max(1.0, n), steps, true};
  s.ns = Axis{1.0 / span, 1.0, steps, true};
  s.ns_relative = true;
  return s;
}

SearchSpace SearchSpace::line(double n, double nc, std::vector<double> ns_values) {
  SearchSpace s;
  s.n = n;
  s.nc_values = {nc};
  s.ns_values = std::move(ns_values);
  s.ns_relative = false;
  return s;
}

namespace {

std::vector<double> nc_list(const SearchSpace& s) { return s.nc_values.empty() ? s.nc.values() : s.nc_values; }
std::vector<double> ns_list(const SearchSpace& s) { return s.ns_values.empty() ? s.ns.values() : s.ns_values; }

double whole(double x) { return std::max(1.0, std::round(x)); }

}  // namespace

std::size_t SearchSpace::nc_count() const { return nc_values.empty() ? static_cast<std::size_t>(nc.steps) : nc_values.size(); }
std::size_t SearchSpace::ns_count() const { return ns_values.empty() ? static_cast<std::size_t>(ns.steps) : ns_values.size(); }

std::optional<std::pair<double, double>> SearchSpace::at(std::size_t i, std::size_t j) const {
  // Axis values are recomputed per call; grids are small.
  const auto ncs = nc_list(*this);
  const auto nss = ns_list(*this);
  if (i >= ncs.size() || j >= nss.size()) return std::nullopt;
  const double c = whole(ncs[i]);
  const double s = whole(ns_relative ? ncs[i] * nss[j] : nss[j]);
  if (!(s <= c && c <= n)) return std::nullopt;
  return std::make_pair(c, s);
}

std::size_t SearchSpace::feasible_count() const {
  std::size_t k = 0;
  for (std::size_t i = 0; i < nc_count(); ++i) {
    for (std::size_t j = 0; j < ns_count(); ++j) k += at(i, j).has_value();
  }
  return k;
}

}  // namespace semcloud::opt
