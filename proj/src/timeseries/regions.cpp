#include "gridstudy/timeseries/regions.hpp"

#include <stdexcept>

namespace gridstudy {

namespace {

constexpr std::array<std::string_view, kRegionCount> kRegionNames = {"SH", "NSW", "VIC", "QLD",
                                                                     "SA"};

constexpr std::array<std::string_view, kGenTypeCount> kGenTypeNames = {
    "black_coal", "brown_coal", "gt", "biomass", "hydro", "wind", "csp", "utility_pv"};

constexpr std::array<std::string_view, 4> kUptakeNames = {"none", "low", "medium", "high"};

}  // namespace

std::string_view to_string(Region r) { return kRegionNames[index_of(r)]; }

std::optional<Region> parse_region(std::string_view name) {
  for (Region r : kAllRegions) {
    if (kRegionNames[index_of(r)] == name) return r;
  }
  return std::nullopt;
}

Region region_from_string(std::string_view name) {
  if (auto r = parse_region(name)) return *r;
  throw std::invalid_argument("unknown region '" + std::string(name) + "'");
}

std::string_view to_string(GenType t) { return kGenTypeNames[index_of(t)]; }

std::optional<GenType> parse_gen_type(std::string_view name) {
  for (GenType t : kAllGenTypes) {
    if (kGenTypeNames[index_of(t)] == name) return t;
  }
  return std::nullopt;
}

GenType gen_type_from_string(std::string_view name) {
  if (auto t = parse_gen_type(name)) return *t;
  throw std::invalid_argument("unknown generator type '" + std::string(name) + "'");
}

std::string_view to_string(Uptake u) { return kUptakeNames[static_cast<std::size_t>(u)]; }

std::optional<Uptake> parse_uptake(std::string_view name) {
  for (std::size_t i = 0; i < kUptakeNames.size(); ++i) {
    if (kUptakeNames[i] == name) return static_cast<Uptake>(i);
  }
  return std::nullopt;
}

}  // namespace gridstudy
