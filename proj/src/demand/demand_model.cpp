#include "gridstudy/demand/demand_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace gridstudy::demand {

void DemandParams::validate() const {
  if (!(grid_min_mw <= 0.0 && 0.0 <= grid_max_mw)) {
    throw std::invalid_argument("grid limits must satisfy grid_min <= 0 <= grid_max");
  }
  if (!(discharge_rate_mw <= 0.0 && 0.0 <= charge_rate_mw)) {
    throw std::invalid_argument("battery rates must satisfy discharge <= 0 <= charge");
  }
  if (!(0.0 <= soc_min_mwh && soc_min_mwh < soc_max_mwh)) {
    throw std::invalid_argument("SOC limits must satisfy 0 <= soc_min < soc_max");
  }
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw std::invalid_argument("battery efficiency must lie in (0, 1]");
  }
}

DemandParams DemandParams::with_defaults(double soc_min_mwh, double soc_max_mwh,
                                         double pv_capacity_mw, double peak_load_mw,
                                         double efficiency) {
  DemandParams p;
  p.soc_min_mwh = soc_min_mwh;
  p.soc_max_mwh = soc_max_mwh;
  p.charge_rate_mw = 0.5 * (soc_max_mwh - soc_min_mwh);
  p.discharge_rate_mw = -p.charge_rate_mw;
  p.grid_max_mw = 1.5 * peak_load_mw;
  p.grid_min_mw = -pv_capacity_mw;
  p.efficiency = efficiency;
  return p;
}

void DayInputs::validate() const {
  if (price.empty()) throw std::invalid_argument("decision window is empty");
  if (load.size() != price.size() || pv.size() != price.size()) {
    throw std::invalid_argument("price, load and pv series must have equal length");
  }
  for (std::size_t h = 0; h < price.size(); ++h) {
    if (!std::isfinite(price[h]) || !std::isfinite(load[h]) || !std::isfinite(pv[h])) {
      throw std::invalid_argument(fmt::format("non-finite input at hour {}", h));
    }
    if (load[h] < 0.0) throw std::invalid_argument(fmt::format("negative load at hour {}", h));
    if (pv[h] < 0.0) throw std::invalid_argument(fmt::format("negative PV at hour {}", h));
  }
}

DemandLp build_lp(const DemandParams& params, const DayInputs& day) {
  params.validate();
  day.validate();
  const std::size_t H = day.hours();
  const double eta = params.efficiency;

  DemandLp out;
  lp::LinearProgram& prog = out.program;
  for (std::size_t h = 0; h < H; ++h) {
    prog.add_variable(fmt::format("p_b[{}]", h), eta * day.price[h], params.discharge_rate_mw,
                      params.charge_rate_mw);
    out.constant_cost += day.price[h] * (day.load[h] - day.pv[h]);
  }

  // Grid limits through the balance equation: grid = load + eta * p_b - pv.
  std::vector<double> row(H, 0.0);
  for (std::size_t h = 0; h < H; ++h) {
    const double base = day.load[h] - day.pv[h];
    std::fill(row.begin(), row.end(), 0.0);
    row[h] = eta;
    prog.add_inequality(row, params.grid_max_mw - base);
    row[h] = -eta;
    prog.add_inequality(row, base - params.grid_min_mw);
  }

  // State k (k = 0..H) holds soc_min + sum of p_b over the first k hours.
  const double window = params.soc_max_mwh - params.soc_min_mwh;
  for (std::size_t k = 0; k <= H; ++k) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t h = 0; h < k; ++h) row[h] = 1.0;
    prog.add_inequality(row, window);
    for (std::size_t h = 0; h < k; ++h) row[h] = -1.0;
    prog.add_inequality(row, 0.0);
  }
  return out;
}

DemandSchedule evaluate_schedule(const DemandParams& params, const DayInputs& day,
                                 const std::vector<double>& battery) {
  const std::size_t H = day.hours();
  if (battery.size() != H) throw std::invalid_argument("battery trajectory has wrong length");
  DemandSchedule s;
  s.battery = battery;
  s.grid.resize(H);
  s.soc.resize(H + 1);
  s.soc[0] = params.soc_min_mwh;
  for (std::size_t h = 0; h < H; ++h) {
    s.grid[h] = day.load[h] + params.efficiency * battery[h] - day.pv[h];
    s.soc[h + 1] = s.soc[h] + battery[h];
    s.cost += day.price[h] * s.grid[h];
  }
  return s;
}

DemandSchedule solve_day(const DemandParams& params, const DayInputs& day) {
  const DemandLp model = build_lp(params, day);
  const lp::LpSolution sol = lp::solve_lp(model.program);
  if (sol.status == lp::LpStatus::Infeasible) {
    int first = -1;
    for (std::size_t h = 0; h < day.hours(); ++h) {
      const double base = day.load[h] - day.pv[h];
      if (base > params.grid_max_mw || base < params.grid_min_mw) {
        first = static_cast<int>(h);
        break;
      }
    }
    throw InfeasibleDay(
        first >= 0
            ? fmt::format("demand schedule infeasible: no-action grid power violates limits at hour {}",
                          first)
            : std::string("demand schedule infeasible"),
        first);
  }
  if (!sol.optimal()) {
    throw std::runtime_error(fmt::format("demand LP failed: {}", lp::to_string(sol.status)));
  }
  return evaluate_schedule(params, day, sol.x);
}

DemandSchedule conventional_baseline(const DayInputs& day) {
  day.validate();
  DemandSchedule s;
  const std::size_t H = day.hours();
  s.grid = day.load;
  s.battery.assign(H, 0.0);
  s.soc.assign(H + 1, 0.0);
  for (std::size_t h = 0; h < H; ++h) s.cost += day.price[h] * day.load[h];
  return s;
}

double schedule_violation(const DemandParams& params, const DayInputs& day,
                          const DemandSchedule& s) {
  const std::size_t H = day.hours();
  if (s.grid.size() != H || s.battery.size() != H || s.soc.size() != H + 1) {
    return std::numeric_limits<double>::infinity();
  }
  double worst = std::abs(s.soc[0] - params.soc_min_mwh);
  auto excess = [&](double v, double lo, double hi) {
    worst = std::max({worst, lo - v, v - hi});
  };
  for (std::size_t h = 0; h < H; ++h) {
    worst = std::max(worst, std::abs(s.soc[h + 1] - (s.soc[h] + s.battery[h])));
    worst = std::max(worst, std::abs(s.grid[h] - (day.load[h] + params.efficiency * s.battery[h] -
                                                  day.pv[h])));
    excess(s.grid[h], params.grid_min_mw, params.grid_max_mw);
    excess(s.battery[h], params.discharge_rate_mw, params.charge_rate_mw);
  }
  for (double soc : s.soc) excess(soc, params.soc_min_mwh, params.soc_max_mwh);
  return std::max(0.0, worst);
}

std::map<Region, TimeSeries> aggregate_nett_demand(
    const std::map<Region, std::vector<DemandSchedule>>& schedules, HourStamp start) {
  std::map<Region, TimeSeries> out;
  std::size_t days = 0;
  bool first = true;
  for (const auto& [region, sched] : schedules) {
    if (first) {
      days = sched.size();
      first = false;
    } else if (sched.size() != days) {
      throw std::invalid_argument(fmt::format("region {} covers {} days, expected {}",
                                              to_string(region), sched.size(), days));
    }
    std::vector<double> values;
    values.reserve(days * kHoursPerDay);
    for (const auto& day : sched) values.insert(values.end(), day.grid.begin(), day.grid.end());
    out.emplace(region, TimeSeries(start, std::move(values),
                                   fmt::format("nett_demand_{}_MW", to_string(region))));
  }
  return out;
}

void write_schedule_csv(const DayInputs& day, const DemandSchedule& s, std::ostream& out) {
  out << "hour,price,load,pv,p_b,p_g,soc\n";
  for (std::size_t h = 0; h < day.hours(); ++h) {
    out << h << ',' << format_exact(day.price[h]) << ',' << format_exact(day.load[h]) << ','
        << format_exact(day.pv[h]) << ',' << format_exact(s.battery[h]) << ','
        << format_exact(s.grid[h]) << ',' << format_exact(s.soc[h]) << '\n';
  }
}

}  // namespace gridstudy::demand
