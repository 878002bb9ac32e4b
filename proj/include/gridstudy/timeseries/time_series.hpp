#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gridstudy {

/// Calendar timestamp truncated to the hour (UTC, no DST).
using HourStamp = std::chrono::time_point<std::chrono::system_clock, std::chrono::hours>;

/// Parses "YYYY-MM-DDTHH:MM" or "YYYY-MM-DDTHH:MM:SS"; minutes and seconds must be zero.
HourStamp parse_timestamp(std::string_view text);
std::string format_timestamp(HourStamp t);

/// 0 = Monday ... 6 = Sunday.
int day_of_week(HourStamp t);
int hour_of_day(HourStamp t);

/// Reported for malformed data files. `row()` is the 1-based line number in
/// the file (header is row 1), or 0 when the error is not tied to a row.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& message, std::size_t row = 0)
      : std::runtime_error(message), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Gap-free hourly series. Power values are MW, prices $/MWh, availability
/// traces per unit of installed capacity. With one-hour steps a MW value is
/// numerically the MWh delivered in that hour.
class TimeSeries {
 public:
  TimeSeries(HourStamp start, std::vector<double> values, std::string label);

  HourStamp start() const noexcept { return start_; }
  HourStamp timestamp_at(std::size_t h) const { return start_ + std::chrono::hours(h); }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t h) const { return values_[h]; }
  const std::string& label() const noexcept { return label_; }
  double sum() const;

  /// Copy with a different label.
  TimeSeries relabeled(std::string label) const { return {start_, values_, std::move(label)}; }

  /// Hours [first, first + count) as a new series.
  TimeSeries slice(std::size_t first, std::size_t count) const;

 private:
  HourStamp start_;
  std::vector<double> values_;
  std::string label_;
};

/// Reads a `timestamp,<value-name>` CSV. The value column name becomes the
/// series label.
TimeSeries load_timeseries_csv(const std::filesystem::path& path, std::size_t expected_hours);
TimeSeries read_timeseries_csv(std::istream& in, std::size_t expected_hours,
                               const std::string& source = "<stream>");

/// Values are written in shortest round-trip decimal form, so re-reading is
/// bit-exact.
void write_timeseries_csv(const TimeSeries& series, std::ostream& out);
void write_timeseries_csv(const TimeSeries& series, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_exact(double v);

/// Per-zone split of a regional quantity. Weights are nonnegative and sum to
/// one within 1e-9.
class ZoneWeights {
 public:
  explicit ZoneWeights(std::map<std::string, double> weights);

  /// Equal shares over the named zones.
  static ZoneWeights equal(const std::vector<std::string>& zones);

  const std::map<std::string, double>& weights() const noexcept { return weights_; }
  double at(const std::string& zone) const { return weights_.at(zone); }

 private:
  std::map<std::string, double> weights_;
};

inline constexpr double kZoneWeightTolerance = 1e-9;

std::map<std::string, TimeSeries> split_regional_demand(const TimeSeries& regional,
                                                        const ZoneWeights& weights);

}  // namespace gridstudy
