#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <vector>

#include "gridstudy/lp/linear_program.hpp"
#include "gridstudy/timeseries/regions.hpp"
#include "gridstudy/timeseries/time_series.hpp"

namespace gridstudy::demand {

/// Scheduling horizon of one decision window, in hourly steps.
inline constexpr std::size_t kHoursPerDay = 24;
/// Battery efficiency applied in the balance equation when none is configured.
inline constexpr double kDefaultEfficiency = 0.9;
/// Residual tolerance for the balance and state-of-charge identities.
inline constexpr double kIdentityTol = 1e-9;

/// Aggregate customer resources. Powers in MW, energies in MWh.
struct DemandParams {
  double grid_max_mw = 0.0;        ///< import limit, >= 0
  double grid_min_mw = 0.0;        ///< export limit, <= 0
  double charge_rate_mw = 0.0;     ///< >= 0
  double discharge_rate_mw = 0.0;  ///< <= 0
  double soc_min_mwh = 0.0;
  double soc_max_mwh = 0.0;
  double efficiency = kDefaultEfficiency;  ///< in (0, 1]

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  /// Defaults for unspecified limits: rates of half the SOC window per hour,
  /// import limit 1.5 x peak load, export limit equal to the PV capacity.
  static DemandParams with_defaults(double soc_min_mwh, double soc_max_mwh, double pv_capacity_mw,
                                    double peak_load_mw, double efficiency = kDefaultEfficiency);
};

/// One decision window. Prices in $/MWh, load and PV in MW.
struct DayInputs {
  std::vector<double> price;
  std::vector<double> load;
  std::vector<double> pv;

  std::size_t hours() const noexcept { return price.size(); }
  void validate() const;
};

/// Optimal trajectories. `grid` >= 0 imports, `battery` >= 0 charges; `soc`
/// has one more entry than the horizon (the state after the last hour).
struct DemandSchedule {
  std::vector<double> grid;
  std::vector<double> battery;
  std::vector<double> soc;
  double cost = 0.0;  ///< $
};

/// Battery-only formulation: grid power and SOC are eliminated, leaving one
/// variable per hour. Full cost = constant_cost + program.objective(battery).
struct DemandLp {
  lp::LinearProgram program;
  double constant_cost = 0.0;
};

DemandLp build_lp(const DemandParams& params, const DayInputs& day);

/// Raised when no schedule satisfies the grid limits. `hour()` is the first
/// hour at which the no-battery schedule breaks a grid limit (-1 if none).
class InfeasibleDay : public std::runtime_error {
 public:
  InfeasibleDay(const std::string& message, int hour) : std::runtime_error(message), hour_(hour) {}
  int hour() const noexcept { return hour_; }

 private:
  int hour_;
};

DemandSchedule solve_day(const DemandParams& params, const DayInputs& day);

/// Conventional load: no battery action and no behind-the-meter PV.
DemandSchedule conventional_baseline(const DayInputs& day);

/// Recomputes grid power, SOC and cost for a given battery trajectory.
DemandSchedule evaluate_schedule(const DemandParams& params, const DayInputs& day,
                                 const std::vector<double>& battery);

/// Largest residual of the balance/SOC identities and box limits (0 if all hold).
double schedule_violation(const DemandParams& params, const DayInputs& day,
                          const DemandSchedule& schedule);

/// Concatenates the daily grid power of each region into one hourly nett
/// demand series per region.
std::map<Region, TimeSeries> aggregate_nett_demand(
    const std::map<Region, std::vector<DemandSchedule>>& schedules, HourStamp start);

/// Columns: hour, price, load, pv, p_b, p_g, soc (soc at the start of the hour).
void write_schedule_csv(const DayInputs& day, const DemandSchedule& schedule, std::ostream& out);

}  // namespace gridstudy::demand
