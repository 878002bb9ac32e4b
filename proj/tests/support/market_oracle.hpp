#pragma once

// Small fleets and a closed-form balance check for two-region commitments.

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridstudy/lp/linear_program.hpp"
#include "gridstudy/market/dispatch.hpp"
#include "gridstudy/market/fleet.hpp"

namespace oracle {

using namespace gridstudy;
using namespace gridstudy::market;

inline const HourStamp kStart = parse_timestamp("2021-01-01T00:00");

inline Generator unit(std::string name, GenType type, Region region, double cap, double srmc,
               double min_stable = 0.0) {
  Generator g;
  g.name = std::move(name);
  g.type = type;
  g.zone = "Z";
  g.region = region;
  g.capacity_mw = cap;
  g.min_stable_mw = min_stable;
  g.srmc = srmc;
  return g;
}

inline Generator renewable(std::string name, Region region, double cap, std::vector<double> trace) {
  auto g = unit(std::move(name), GenType::Wind, region, cap, 0.0);
  g.availability = TimeSeries(kStart, std::move(trace), "avail");
  return g;
}

inline RegionalDemand demand_of(std::initializer_list<std::pair<Region, double>> items) {
  RegionalDemand d{};
  for (const auto& [r, v] : items) d[index_of(r)] = v;
  return d;
}

inline std::vector<Interconnector> nem_lines() {
  return {{Region::NSW, Region::QLD, 600.0, -1000.0},
          {Region::NSW, Region::VIC, 500.0, -1500.0},
          {Region::VIC, Region::SA, 500.0, -500.0},
          {Region::SH, Region::NSW, 2000.0, -2000.0}};
}

// Two regions joined by one line: a commitment balances exactly iff the
// interval of admissible flows is non-empty.
inline bool two_region_balances(const Fleet& fleet, const Commitment& c, double d_a, double d_b,
                         const Interconnector& line) {
  double lo_a = 0.0, hi_a = 0.0, lo_b = 0.0, hi_b = 0.0;
  for (std::size_t g = 0; g < fleet.size(); ++g) {
    if (!c[g]) continue;
    double& lo = fleet[g].region == line.from ? lo_a : lo_b;
    double& hi = fleet[g].region == line.from ? hi_a : hi_b;
    lo += fleet[g].min_stable_mw;
    hi += fleet[g].capacity_mw;
  }
  // flow f from a to b: gen_a = d_a + f, gen_b = d_b - f.
  const double f_lo = std::max({line.reverse_mw, lo_a - d_a, d_b - hi_b});
  const double f_hi = std::min({line.forward_mw, hi_a - d_a, d_b - lo_b});
  return f_lo <= f_hi + 1e-9;
}

// Cheapest exact-balance cost for a commitment, from a separately built LP.
inline std::optional<double> two_region_cost(const Fleet& fleet, const Commitment& c, double d_a,
                                      double d_b, const Interconnector& line) {
  lp::LinearProgram p;
  std::vector<double> in_a, in_b;
  for (std::size_t g = 0; g < fleet.size(); ++g) {
    if (!c[g]) continue;
    p.add_variable(fleet[g].name, fleet[g].srmc, fleet[g].min_stable_mw, fleet[g].capacity_mw);
    in_a.push_back(fleet[g].region == line.from ? 1.0 : 0.0);
    in_b.push_back(fleet[g].region == line.from ? 0.0 : 1.0);
  }
  p.add_variable("flow", 0.0, line.reverse_mw, line.forward_mw);
  in_a.push_back(-1.0);
  in_b.push_back(1.0);
  p.add_equality(in_a, d_a);
  p.add_equality(in_b, d_b);
  const auto sol = lp::solve_lp(p);
  if (!sol.optimal()) return std::nullopt;
  return sol.objective;
}

inline std::string fmt_name(Region r, std::size_t g) { return std::string(to_string(r)) + "_" + std::to_string(g); }

inline double gen_cost(const Fleet& fleet, const HourDispatch& h) {
  double s = 0.0;
  for (std::size_t g = 0; g < fleet.size(); ++g) s += fleet[g].srmc * h.output_mw[g];
  return s;
}

}  // namespace oracle
