#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "gridstudy/market/dispatch.hpp"

namespace gridstudy::market {

/// One row per hour: hour, timestamp, demand/unserved/dumped/price per region,
/// each generator's output and each interconnector's flow, then the flags.
void write_dispatch_hourly_csv(const Fleet& fleet, const std::vector<Interconnector>& lines,
                               const DispatchResult& result, HourStamp start, std::ostream& out);

/// Header `spilled_energy_TWh,spilled_hours_pct,gt_energy_TWh,loadability_GW`
/// and one row. Loadability is left blank when not yet computed.
void write_dispatch_summary_csv(const DispatchResult& result, std::optional<double> loadability_gw,
                                std::ostream& out);

}  // namespace gridstudy::market
