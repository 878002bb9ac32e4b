#include "gridstudy/price/features.hpp"

#include <cmath>

#include <fmt/format.h>

namespace gridstudy::price {

std::vector<double> FeatureVector::to_row() const {
  std::vector<double> row;
  row.reserve(3 + line_limits_mw.size() + capacity_mw.size());
  row.push_back(demand_mw);
  row.push_back(static_cast<double>(hour));
  row.push_back(static_cast<double>(day_of_week));
  row.insert(row.end(), line_limits_mw.begin(), line_limits_mw.end());
  row.insert(row.end(), capacity_mw.begin(), capacity_mw.end());
  return row;
}

std::vector<std::string> FeatureVector::column_names(const std::vector<std::string>& lines) {
  std::vector<std::string> names = {"demand_mw", "hour", "day_of_week"};
  for (const auto& l : lines) names.push_back("line:" + l);
  for (GenType t : kAllGenTypes) {
    for (Region a : kAllRegions) names.push_back(fmt::format("cap:{}:{}", to_string(t), to_string(a)));
  }
  return names;
}

void FeatureVector::validate() const {
  if (hour < 0 || hour > 23) throw std::invalid_argument("hour of day out of range");
  if (day_of_week < 0 || day_of_week > 6) throw std::invalid_argument("day of week out of range");
  for (double v : to_row()) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
  }
}

FeatureVector extract_features(const SystemSnapshot& snap) {
  if (!snap.time) throw MissingField("snapshot has no timestamp");
  if (!snap.demand_forecast_mw) throw MissingField("snapshot has no demand forecast");
  if (!snap.fleet) throw MissingField("snapshot has no fleet description");
  if (!snap.lines) throw MissingField("snapshot has no line limits");

  FeatureVector f;
  f.demand_mw = *snap.demand_forecast_mw;
  f.hour = hour_of_day(*snap.time);
  f.day_of_week = day_of_week(*snap.time);
  for (const auto& l : *snap.lines) f.line_limits_mw.push_back(l.forward_mw - l.reverse_mw);
  for (const auto& u : *snap.fleet) {
    f.capacity_mw[index_of(u.type) * kRegionCount + index_of(u.area)] += u.available_mw;
  }
  f.validate();
  return f;
}

}  // namespace gridstudy::price
