#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridstudy/market/fleet.hpp"
#include "gridstudy/timeseries/regions.hpp"
#include "gridstudy/timeseries/time_series.hpp"

namespace gridstudy::market {

/// Value of lost load, $/MWh.
inline constexpr double kVoll = 10000.0;
/// Penalty on dumped energy, $/MWh.
inline constexpr double kDumpPenalty = 0.01;
/// Tolerance for the hourly balance invariant and for flagging hours.
inline constexpr double kBalanceTol = 1e-6;

using Commitment = std::vector<bool>;
using RegionalDemand = RegionArray<double>;

struct HourDispatch {
  std::vector<double> output_mw;     ///< per generator
  std::vector<double> flow_mw;       ///< per interconnector, positive from -> to
  RegionalDemand demand_mw{};
  RegionalDemand unserved_mw{};
  RegionalDemand dumped_mw{};
  RegionalDemand price{};            ///< $/MWh
  bool unserved_hour = false;
  bool dumped_hour = false;
  double cost = 0.0;                 ///< LP objective

  /// max over regions of |gen + imports - exports + unserved - demand - dumped|
  double balance_residual(const Fleet& fleet, const std::vector<Interconnector>& lines) const;
};

struct DispatchResult {
  std::vector<HourDispatch> hours;
  double spilled_energy_twh = 0.0;
  double spilled_hours_pct = 0.0;  ///< share of all hours with dumped energy
  double gt_energy_twh = 0.0;
  double unserved_energy_twh = 0.0;
  std::size_t unserved_hours = 0;
  std::vector<double> generator_energy_mwh;
};

class DispatchError : public std::runtime_error {
 public:
  DispatchError(const std::string& what, std::size_t hour)
      : std::runtime_error(what), hour_(hour) {}
  std::size_t hour() const { return hour_; }

 private:
  std::size_t hour_;
};

/// Priority-list commitment for one hour. Renewables are always committed.
/// Dispatchables are added in ascending SRMC until committed capacity covers
/// total demand. If interconnector limits leave a region short, the cheapest
/// uncommitted unit in a short region (else anywhere) is added until the
/// shortfall clears or the fleet runs out. Finally units are decommitted from
/// the expensive end while minimum stable output plus renewables exceeds
/// demand, as long as doing so creates no shortfall. If unserved or dumped
/// energy still exceeds what any commitment must incur, single-unit flips and
/// then one-for-one swaps are applied while they reduce unserved, then dumped, energy.
Commitment commit_merit_order(const Fleet& fleet, const RegionalDemand& demand, std::size_t hour,
                              const std::vector<Interconnector>& lines);

/// LP dispatch of the committed units. Throws DispatchError on LP failure.
HourDispatch dispatch_hour(const Fleet& fleet, const Commitment& committed,
                           const RegionalDemand& demand, const std::vector<Interconnector>& lines,
                           std::size_t hour);

/// Commit and dispatch every hour, then aggregate totals. Regions missing
/// from `nett_demand` have zero demand.
DispatchResult simulate_horizon(const Fleet& fleet, const std::map<Region, TimeSeries>& nett_demand,
                                const std::vector<Interconnector>& lines);

/// Recomputes the totals of `result` from its hourly records.
void aggregate_totals(const Fleet& fleet, DispatchResult& result);

}  // namespace gridstudy::market
