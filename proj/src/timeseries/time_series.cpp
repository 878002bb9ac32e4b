#include "gridstudy/timeseries/time_series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace gridstudy {

namespace {

int parse_int(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("malformed timestamp '" + std::string(whole) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

HourStamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  text = trim(text);
  // YYYY-MM-DDTHH:MM[:SS]
  if (text.size() != 16 && text.size() != 19) {
    throw std::invalid_argument("malformed timestamp '" + std::string(text) + "'");
  }
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' ||
      (text.size() == 19 && text[16] != ':')) {
    throw std::invalid_argument("malformed timestamp '" + std::string(text) + "'");
  }
  const int y = parse_int(text.substr(0, 4), text);
  const int mo = parse_int(text.substr(5, 2), text);
  const int d = parse_int(text.substr(8, 2), text);
  const int hh = parse_int(text.substr(11, 2), text);
  const int mm = parse_int(text.substr(14, 2), text);
  const int ss = text.size() == 19 ? parse_int(text.substr(17, 2), text) : 0;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh < 0 || hh > 23 || mm != 0 || ss != 0) {
    throw std::invalid_argument("timestamp '" + std::string(text) + "' is not a valid whole hour");
  }
  return time_point_cast<hours>(sys_days{ymd}) + hours{hh};
}

std::string format_timestamp(HourStamp t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const auto hh = (t - day_start).count();
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:00", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hh);
}

int day_of_week(HourStamp t) {
  using namespace std::chrono;
  const weekday wd{floor<days>(t)};
  return static_cast<int>(wd.iso_encoding()) - 1;
}

int hour_of_day(HourStamp t) {
  using namespace std::chrono;
  return static_cast<int>((t - floor<days>(t)).count());
}

TimeSeries::TimeSeries(HourStamp start, std::vector<double> values, std::string label)
    : start_(start), values_(std::move(values)), label_(std::move(label)) {
  if (values_.empty()) throw std::invalid_argument("time series '" + label_ + "' is empty");
}

double TimeSeries::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

TimeSeries TimeSeries::slice(std::size_t first, std::size_t count) const {
  if (first + count > values_.size() || count == 0) {
    throw std::out_of_range("slice outside time series '" + label_ + "'");
  }
  return {timestamp_at(first),
          std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(first),
                              values_.begin() + static_cast<std::ptrdiff_t>(first + count)),
          label_};
}

TimeSeries read_timeseries_csv(std::istream& in, std::size_t expected_hours,
                               const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file", 1);
  std::string_view header = trim(line);
  const auto comma = header.find(',');
  if (comma == std::string_view::npos || trim(header.substr(0, comma)) != "timestamp" ||
      header.find(',', comma + 1) != std::string_view::npos) {
    throw DataError(source + ": header must be 'timestamp,<value>'", 1);
  }
  const std::string label{trim(header.substr(comma + 1))};
  if (label.empty()) throw DataError(source + ": value column has no name", 1);

  std::vector<double> values;
  values.reserve(expected_hours);
  HourStamp start{};
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto c = text.find(',');
    if (c == std::string_view::npos) {
      throw DataError(fmt::format("{}: row {}: expected two columns", source, row), row);
    }
    HourStamp stamp;
    try {
      stamp = parse_timestamp(text.substr(0, c));
    } catch (const std::invalid_argument& e) {
      throw DataError(fmt::format("{}: row {}: {}", source, row, e.what()), row);
    }
    const std::string_view field = trim(text.substr(c + 1));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
      throw DataError(fmt::format("{}: row {}: non-numeric value '{}'", source, row, field), row);
    }
    if (values.empty()) {
      start = stamp;
    } else {
      const HourStamp expected = start + std::chrono::hours(values.size());
      if (stamp < expected) {
        throw DataError(fmt::format("{}: row {}: duplicate or out-of-order timestamp {}", source,
                                    row, format_timestamp(stamp)),
                        row);
      }
      if (stamp > expected) {
        throw DataError(fmt::format("{}: row {}: gap, missing timestamp {}", source, row,
                                    format_timestamp(expected)),
                        row);
      }
    }
    values.push_back(value);
  }
  if (values.size() != expected_hours) {
    throw DataError(fmt::format("{}: row {}: expected {} hourly rows, found {}", source, row,
                                expected_hours, values.size()),
                    row);
  }
  return {start, std::move(values), label};
}

TimeSeries load_timeseries_csv(const std::filesystem::path& path, std::size_t expected_hours) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_timeseries_csv(in, expected_hours, path.string());
}

std::string format_exact(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

void write_timeseries_csv(const TimeSeries& series, std::ostream& out) {
  out << "timestamp," << series.label() << '\n';
  for (std::size_t h = 0; h < series.size(); ++h) {
    out << format_timestamp(series.timestamp_at(h)) << ',' << format_exact(series[h]) << '\n';
  }
}

void write_timeseries_csv(const TimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_timeseries_csv(series, out);
}

ZoneWeights::ZoneWeights(std::map<std::string, double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("zone weights are empty");
  double total = 0.0;
  for (const auto& [zone, w] : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("zone weight for '" + zone + "' must be finite and >= 0");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kZoneWeightTolerance) {
    throw std::invalid_argument(fmt::format("zone weights sum to {}, expected 1", total));
  }
}

ZoneWeights ZoneWeights::equal(const std::vector<std::string>& zones) {
  std::map<std::string, double> w;
  for (const auto& z : zones) w[z] = 1.0 / static_cast<double>(zones.size());
  return ZoneWeights(std::move(w));
}

std::map<std::string, TimeSeries> split_regional_demand(const TimeSeries& regional,
                                                        const ZoneWeights& weights) {
  std::map<std::string, TimeSeries> zones;
  for (const auto& [zone, w] : weights.weights()) {
    std::vector<double> v(regional.size());
    for (std::size_t h = 0; h < v.size(); ++h) v[h] = w * regional[h];
    zones.emplace(zone, TimeSeries(regional.start(), std::move(v), regional.label() + ":" + zone));
  }
  return zones;
}

}  // namespace gridstudy
