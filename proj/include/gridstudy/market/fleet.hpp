#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridstudy/timeseries/regions.hpp"
#include "gridstudy/timeseries/scenario_config.hpp"
#include "gridstudy/timeseries/time_series.hpp"

namespace gridstudy::market {

/// Default minimum stable level of coal units, as a fraction of capacity.
inline constexpr double kCoalMinStableFraction = 0.4;

struct Generator {
  std::string name;
  GenType type = GenType::BlackCoal;
  std::string zone;
  Region region = Region::NSW;
  double capacity_mw = 0.0;
  double min_stable_mw = 0.0;
  double srmc = 0.0;  ///< $/MWh, zero for renewables
  /// Per-unit availability trace; absent means always fully available.
  std::optional<TimeSeries> availability;

  bool renewable() const { return is_renewable(type); }
  /// Capacity offered in hour `h` (MW).
  double available_mw(std::size_t h) const {
    return availability ? capacity_mw * (*availability)[h] : capacity_mw;
  }
  /// Throws std::invalid_argument if an invariant is violated.
  void validate() const;
};

using Fleet = std::vector<Generator>;

struct Interconnector {
  Region from = Region::NSW;
  Region to = Region::QLD;
  double forward_mw = 0.0;  ///< max flow from -> to
  double reverse_mw = 0.0;  ///< most negative flow (to -> from), <= 0

  std::string name() const;
  void validate() const;
};

/// Resolves configured units, applying default minimum stable levels and
/// attaching availability traces by key.
Generator make_generator(const GeneratorSpec& spec,
                         const std::map<std::string, TimeSeries>& availability);
Fleet make_fleet(const std::vector<GeneratorSpec>& specs,
                 const std::map<std::string, TimeSeries>& availability);
std::vector<Interconnector> make_interconnectors(const std::vector<InterconnectorSpec>& specs);

/// Circular shift within each day: output at hour h of a day equals the input
/// at hour (h - delay) mod 24 of the same day. Daily energy is unchanged.
TimeSeries csp_profile_shift(const TimeSeries& availability, int delay_hours = 12);

}  // namespace gridstudy::market
