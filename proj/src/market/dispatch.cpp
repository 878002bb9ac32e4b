#include "gridstudy/market/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "gridstudy/lp/linear_program.hpp"

namespace gridstudy::market {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct HourLp {
  lp::LinearProgram program;
  std::vector<std::size_t> gen_var;  // per generator, kNone if not committed
  std::size_t flow0 = 0;
  std::size_t unserved0 = 0;
  std::size_t dumped0 = 0;
};

HourLp build_hour_lp(const Fleet& fleet, const Commitment& committed, const RegionalDemand& demand,
                     const std::vector<Interconnector>& lines, std::size_t hour) {
  HourLp out;
  auto& p = out.program;
  out.gen_var.assign(fleet.size(), kNone);
  for (std::size_t g = 0; g < fleet.size(); ++g) {
    if (!committed[g]) continue;
    const auto& gen = fleet[g];
    const double avail = std::max(0.0, gen.available_mw(hour));
    const double lo = gen.renewable() ? avail : std::min(gen.min_stable_mw, avail);
    out.gen_var[g] = p.add_variable(gen.name, gen.srmc, lo, avail);
  }
  out.flow0 = p.num_vars();
  for (const auto& l : lines) p.add_variable("flow:" + l.name(), 0.0, l.reverse_mw, l.forward_mw);
  out.unserved0 = p.num_vars();
  for (Region r : kAllRegions) {
    p.add_variable("unserved:" + std::string(to_string(r)), kVoll, 0.0, lp::kInfinity);
  }
  out.dumped0 = p.num_vars();
  for (Region r : kAllRegions) {
    p.add_variable("dumped:" + std::string(to_string(r)), kDumpPenalty, 0.0, lp::kInfinity);
  }

  for (Region r : kAllRegions) {
    std::vector<double> row(p.num_vars(), 0.0);
    for (std::size_t g = 0; g < fleet.size(); ++g) {
      if (out.gen_var[g] != kNone && fleet[g].region == r) row[out.gen_var[g]] = 1.0;
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].to == r) row[out.flow0 + i] += 1.0;
      if (lines[i].from == r) row[out.flow0 + i] -= 1.0;
    }
    row[out.unserved0 + index_of(r)] = 1.0;
    row[out.dumped0 + index_of(r)] = -1.0;
    p.add_equality(row, demand[index_of(r)]);
  }
  return out;
}

lp::LpSolution solve_hour(const HourLp& h, std::size_t hour) {
  auto sol = lp::solve_lp(h.program);
  if (!sol.optimal()) {
    throw DispatchError(
        fmt::format("dispatch LP for hour {} failed: {}", hour, lp::to_string(sol.status)), hour);
  }
  return sol;
}

/// Unserved MW per region for a commitment.
RegionalDemand shortfall(const Fleet& fleet, const Commitment& committed,
                         const RegionalDemand& demand, const std::vector<Interconnector>& lines,
                         std::size_t hour) {
  const auto h = build_hour_lp(fleet, committed, demand, lines, hour);
  const auto sol = solve_hour(h, hour);
  RegionalDemand out{};
  for (Region r : kAllRegions) out[index_of(r)] = sol.x[h.unserved0 + index_of(r)];
  return out;
}

double total(const RegionalDemand& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

/// Total unserved and dumped MW of a commitment.
struct Imbalance {
  double unserved = 0.0;
  double dumped = 0.0;

  bool better_than(const Imbalance& o) const {
    if (unserved < o.unserved - kBalanceTol) return true;
    return unserved <= o.unserved + kBalanceTol && dumped < o.dumped - kBalanceTol;
  }
};

Imbalance imbalance(const Fleet& fleet, const Commitment& committed, const RegionalDemand& demand,
                    const std::vector<Interconnector>& lines, std::size_t hour) {
  const auto h = build_hour_lp(fleet, committed, demand, lines, hour);
  const auto sol = solve_hour(h, hour);
  Imbalance out;
  for (Region r : kAllRegions) {
    out.unserved += sol.x[h.unserved0 + index_of(r)];
    out.dumped += sol.x[h.dumped0 + index_of(r)];
  }
  return out;
}

}  // namespace

double HourDispatch::balance_residual(const Fleet& fleet,
                                      const std::vector<Interconnector>& lines) const {
  RegionalDemand net{};
  for (std::size_t g = 0; g < fleet.size(); ++g) net[index_of(fleet[g].region)] += output_mw[g];
  for (std::size_t i = 0; i < lines.size(); ++i) {
    net[index_of(lines[i].to)] += flow_mw[i];
    net[index_of(lines[i].from)] -= flow_mw[i];
  }
  double worst = 0.0;
  for (std::size_t r = 0; r < kRegionCount; ++r) {
    worst = std::max(worst, std::abs(net[r] + unserved_mw[r] - demand_mw[r] - dumped_mw[r]));
  }
  return worst;
}

Commitment commit_merit_order(const Fleet& fleet, const RegionalDemand& demand, std::size_t hour,
                              const std::vector<Interconnector>& lines) {
  Commitment c(fleet.size(), false);
  const double load = std::max(0.0, total(demand));

  double must_take = 0.0;
  std::vector<std::size_t> order;
  for (std::size_t g = 0; g < fleet.size(); ++g) {
    if (fleet[g].renewable()) {
      c[g] = true;
      must_take += std::max(0.0, fleet[g].available_mw(hour));
    } else {
      order.push_back(g);
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fleet[a].srmc < fleet[b].srmc; });

  double capacity = must_take;
  for (std::size_t g : order) {
    if (capacity >= load) break;
    c[g] = true;
    capacity += std::max(0.0, fleet[g].available_mw(hour));
  }

  // Transfer limits can strand cheap capacity away from the load.
  for (;;) {
    const auto short_mw = shortfall(fleet, c, demand, lines, hour);
    if (total(short_mw) <= kBalanceTol) break;
    std::size_t pick = kNone;
    for (std::size_t g : order) {
      if (!c[g] && short_mw[index_of(fleet[g].region)] > kBalanceTol) {
        pick = g;
        break;
      }
    }
    if (pick == kNone) {
      for (std::size_t g : order) {
        if (!c[g] && fleet[g].available_mw(hour) > 0.0) {
          pick = g;
          break;
        }
      }
    }
    if (pick == kNone) break;
    c[pick] = true;
  }

  auto min_output = [&] {
    double s = must_take;
    for (std::size_t g : order) {
      if (c[g]) s += std::min(fleet[g].min_stable_mw, std::max(0.0, fleet[g].available_mw(hour)));
    }
    return s;
  };
  const double base_short = total(shortfall(fleet, c, demand, lines, hour));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (min_output() <= load + kBalanceTol) break;
    const std::size_t g = *it;
    if (!c[g] || fleet[g].min_stable_mw <= 0.0) continue;
    c[g] = false;
    if (total(shortfall(fleet, c, demand, lines, hour)) > base_short + kBalanceTol) c[g] = true;
  }

  // Minimum stable levels can still force dumping that another unit mix avoids.
  // Unserved is smallest with every unit on and dumping smallest with every
  // dispatchable off; repair only when the commitment is worse than either bound.
  Imbalance now = imbalance(fleet, c, demand, lines, hour);
  Commitment all_on = c;
  Commitment all_off = c;
  for (std::size_t g : order) {
    all_on[g] = true;
    all_off[g] = false;
  }
  const double least_unserved = imbalance(fleet, all_on, demand, lines, hour).unserved;
  const double least_dumped = imbalance(fleet, all_off, demand, lines, hour).dumped;
  auto repairable = [&] {
    return now.unserved > least_unserved + kBalanceTol || now.dumped > least_dumped + kBalanceTol;
  };
  while (repairable()) {
    Commitment best_c;
    Imbalance best = now;
    auto consider = [&](const Commitment& trial) {
      const Imbalance v = imbalance(fleet, trial, demand, lines, hour);
      if (v.better_than(best)) {
        best = v;
        best_c = trial;
      }
    };
    for (std::size_t g : order) {
      Commitment trial = c;
      trial[g] = !trial[g];
      consider(trial);
    }
    if (best_c.empty()) {
      for (std::size_t off : order) {
        if (!c[off]) continue;
        for (std::size_t on : order) {
          if (c[on]) continue;
          Commitment trial = c;
          trial[off] = false;
          trial[on] = true;
          consider(trial);
        }
      }
    }
    if (best_c.empty()) break;
    c = std::move(best_c);
    now = best;
  }
  return c;
}

HourDispatch dispatch_hour(const Fleet& fleet, const Commitment& committed,
                           const RegionalDemand& demand, const std::vector<Interconnector>& lines,
                           std::size_t hour) {
  if (committed.size() != fleet.size()) {
    throw std::invalid_argument("commitment size does not match the fleet");
  }
  const auto h = build_hour_lp(fleet, committed, demand, lines, hour);
  const auto sol = solve_hour(h, hour);

  HourDispatch d;
  d.output_mw.assign(fleet.size(), 0.0);
  for (std::size_t g = 0; g < fleet.size(); ++g) {
    if (h.gen_var[g] != kNone) d.output_mw[g] = sol.x[h.gen_var[g]];
  }
  d.flow_mw.assign(sol.x.begin() + static_cast<std::ptrdiff_t>(h.flow0),
                   sol.x.begin() + static_cast<std::ptrdiff_t>(h.unserved0));
  d.demand_mw = demand;
  double unserved = 0.0;
  double dumped = 0.0;
  for (std::size_t r = 0; r < kRegionCount; ++r) {
    d.unserved_mw[r] = sol.x[h.unserved0 + r];
    d.dumped_mw[r] = sol.x[h.dumped0 + r];
    d.price[r] = sol.eq_duals[r];
    unserved += d.unserved_mw[r];
    dumped += d.dumped_mw[r];
  }
  d.unserved_hour = unserved > kBalanceTol;
  d.dumped_hour = dumped > kBalanceTol;
  d.cost = sol.objective;
  const double residual = d.balance_residual(fleet, lines);
  if (residual > kBalanceTol) {
    throw DispatchError(fmt::format("hour {}: balance residual {} MW", hour, residual), hour);
  }
  return d;
}

void aggregate_totals(const Fleet& fleet, DispatchResult& result) {
  result.generator_energy_mwh.assign(fleet.size(), 0.0);
  double spilled = 0.0;
  double unserved = 0.0;
  std::size_t spilled_hours = 0;
  result.unserved_hours = 0;
  for (const auto& h : result.hours) {
    for (std::size_t g = 0; g < fleet.size(); ++g) result.generator_energy_mwh[g] += h.output_mw[g];
    for (std::size_t r = 0; r < kRegionCount; ++r) {
      spilled += h.dumped_mw[r];
      unserved += h.unserved_mw[r];
    }
    if (h.dumped_hour) ++spilled_hours;
    if (h.unserved_hour) ++result.unserved_hours;
  }
  double gt = 0.0;
  for (std::size_t g = 0; g < fleet.size(); ++g) {
    if (fleet[g].type == GenType::GasTurbine) gt += result.generator_energy_mwh[g];
  }
  result.spilled_energy_twh = spilled / 1e6;
  result.unserved_energy_twh = unserved / 1e6;
  result.gt_energy_twh = gt / 1e6;
  result.spilled_hours_pct =
      result.hours.empty() ? 0.0
                           : 100.0 * static_cast<double>(spilled_hours) /
                                 static_cast<double>(result.hours.size());
}

DispatchResult simulate_horizon(const Fleet& fleet, const std::map<Region, TimeSeries>& nett_demand,
                                const std::vector<Interconnector>& lines) {
  if (nett_demand.empty()) throw std::invalid_argument("no demand series");
  const auto& first = nett_demand.begin()->second;
  const std::size_t n = first.size();
  for (const auto& [r, ts] : nett_demand) {
    if (ts.size() != n || ts.start() != first.start()) {
      throw std::invalid_argument(fmt::format("demand for {} does not cover the common horizon",
                                              to_string(r)));
    }
  }
  for (const auto& g : fleet) {
    if (g.availability && (g.availability->size() < n || g.availability->start() != first.start())) {
      throw std::invalid_argument(g.name + ": availability does not cover the demand horizon");
    }
  }

  DispatchResult result;
  result.hours.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    RegionalDemand demand{};
    for (const auto& [r, ts] : nett_demand) demand[index_of(r)] = ts[t];
    const auto c = commit_merit_order(fleet, demand, t, lines);
    result.hours.push_back(dispatch_hour(fleet, c, demand, lines, t));
  }
  aggregate_totals(fleet, result);
  return result;
}

}  // namespace gridstudy::market
