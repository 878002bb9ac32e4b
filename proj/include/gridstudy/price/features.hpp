#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridstudy/timeseries/regions.hpp"
#include "gridstudy/timeseries/time_series.hpp"

namespace gridstudy::price {

/// Capacity offered by one unit in the hour (capacity x availability), MW.
struct UnitCapacity {
  GenType type;
  Region area;
  double available_mw;
};

/// Interconnector adjacent to the predicted region.
struct LineLimit {
  std::string name;
  double forward_mw;
  double reverse_mw;  ///< <= 0
};

/// Everything known about the system one hour ahead. Fields are optional so
/// that incomplete snapshots can be diagnosed.
struct SystemSnapshot {
  std::optional<HourStamp> time;
  std::optional<double> demand_forecast_mw;
  std::optional<std::vector<UnitCapacity>> fleet;
  std::optional<std::vector<LineLimit>> lines;
};

/// Regressor inputs for one hour.
struct FeatureVector {
  double demand_mw = 0.0;
  int hour = 0;         ///< 0-23
  int day_of_week = 0;  ///< 0 = Monday
  /// Transfer range (forward - reverse) per adjacent line, MW.
  std::vector<double> line_limits_mw;
  /// Available capacity per (type, area), indexed type-major: type * kRegionCount + area.
  std::vector<double> capacity_mw = std::vector<double>(kGenTypeCount * kRegionCount, 0.0);

  double capacity(GenType t, Region a) const {
    return capacity_mw[index_of(t) * kRegionCount + index_of(a)];
  }

  /// Flat numeric row: demand, hour, day of week, line limits, capacities.
  std::vector<double> to_row() const;
  /// Column names matching to_row(); line names come from `lines`.
  static std::vector<std::string> column_names(const std::vector<std::string>& lines);

  /// Throws std::invalid_argument on non-finite fields or out-of-range calendar values.
  void validate() const;
};

class MissingField : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

FeatureVector extract_features(const SystemSnapshot& snapshot);

}  // namespace gridstudy::price
