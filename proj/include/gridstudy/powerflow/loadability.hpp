#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gridstudy/powerflow/network.hpp"
#include "gridstudy/powerflow/newton_raphson.hpp"
#include "gridstudy/timeseries/scenario_config.hpp"

namespace gridstudy::powerflow {

/// Multiplies P and Q of every bus in `region` by `lambda` (>= 1).
BusNetwork scale_loads(const BusNetwork& net, Region region, double lambda);

/// Equal per-unit participation: `units[i]` is the number of participating
/// units at bus i. Falls back to the slack bus when the count is zero.
std::vector<double> equal_participation(const BusNetwork& net, const std::vector<double>& units);

/// The network at load scale `lambda`: loads in `region` scaled and the
/// active-power increment added to generation by `participation`.
BusNetwork stressed_network(const BusNetwork& base, Region region,
                            const std::vector<double>& participation, double lambda);

struct HourLoadability {
  std::size_t hour = 0;
  std::optional<double> lambda_star;  ///< absent for degenerate hours
  double served_load_mw = 0.0;        ///< total system load at lambda_star
  double region_load_mw = 0.0;        ///< stressed-region load at lambda_star
  double min_voltage_pu = 0.0;        ///< at lambda_star
  bool capped = false;                ///< still converging at max_lambda
};

struct LoadabilityResult {
  std::vector<HourLoadability> hours;
  double step = 0.0;
};

class LoadabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest lambda = 1 + k*step at which the power flow converges, found by a
/// linear scan or by a coarse scan refined with the fine step.
HourLoadability find_lambda_star(const BusNetwork& base, Region region,
                                 const std::vector<double>& participation,
                                 const LoadabilityOptions& options, std::size_t hour = 0);

/// Runs find_lambda_star over prepared hourly operating points.
LoadabilityResult compute_loadability(const std::vector<BusNetwork>& hourly, Region region,
                                      const std::vector<std::vector<double>>& participation,
                                      const LoadabilityOptions& options,
                                      const std::vector<std::size_t>& hour_index = {});

/// Mean served load over defined hours, in GW. Throws LoadabilityError if
/// every hour is degenerate.
double average_loadability(const LoadabilityResult& result);

/// Header: hour,lambda_star,served_load_MW,min_voltage_pu,region_load_MW.
/// Degenerate hours have empty value fields.
void write_loadability_csv(const LoadabilityResult& result, std::ostream& out);

}  // namespace gridstudy::powerflow
