#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gridstudy/timeseries/time_series.hpp"

namespace gridstudy::scenario {

inline constexpr std::uint64_t kFixtureSeed = 20210101;

struct FixtureOptions {
  std::uint64_t seed = kFixtureSeed;
  std::string start = "2021-01-01T00:00";
  std::size_t hours = 8760;
};

/// Writes the synthetic study year into `dir`: regional demand, rooftop PV
/// and historical price traces, wind and CSP availability, the bus/branch
/// network and scenarios/scenario_{1..5}.yaml. Returns the files written,
/// relative to `dir`, in a fixed order.
///
/// Recipe (per region unless noted):
///   demand  = mean * (1 + seasonal) * diurnal * weekend * (1 + AR(1) noise)
///   pv      = clear-sky bell between sunrise and sunset * daily cloud factor
///   wind    = clamped AR(1) capacity factor
///   csp     = broad solar-shaped profile with a storage floor, before the shift
///   price   = convex function of demand relative to the annual peak + noise
std::vector<std::string> write_fixture(const std::filesystem::path& dir,
                                       const FixtureOptions& options = {});

}  // namespace gridstudy::scenario
