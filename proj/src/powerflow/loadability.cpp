#include "gridstudy/powerflow/loadability.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "gridstudy/timeseries/time_series.hpp"

namespace gridstudy::powerflow {

BusNetwork scale_loads(const BusNetwork& net, Region region, double lambda) {
  if (!(lambda >= 1.0)) throw std::invalid_argument("load scale must be >= 1");
  bool found = false;
  BusNetwork out = net;
  for (auto& b : out.buses) {
    if (b.region != region) continue;
    found = true;
    b.p_load_mw *= lambda;
    b.q_load_mvar *= lambda;
  }
  if (!found) {
    throw std::invalid_argument(fmt::format("no bus belongs to region {}", to_string(region)));
  }
  return out;
}

std::vector<double> equal_participation(const BusNetwork& net, const std::vector<double>& units) {
  if (units.size() != net.buses.size()) throw std::invalid_argument("one unit count per bus required");
  std::vector<double> share(net.buses.size(), 0.0);
  const double total = std::accumulate(units.begin(), units.end(), 0.0);
  if (total <= 0.0) {
    share[net.slack_position()] = 1.0;
    return share;
  }
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (units[i] < 0.0) throw std::invalid_argument("negative unit count");
    share[i] = units[i] / total;
  }
  return share;
}

BusNetwork stressed_network(const BusNetwork& base, Region region,
                            const std::vector<double>& participation, double lambda) {
  if (participation.size() != base.buses.size()) {
    throw std::invalid_argument("one participation factor per bus required");
  }
  double sum = 0.0;
  for (double f : participation) {
    if (f < 0.0) throw std::invalid_argument("participation factors must be >= 0");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("participation factors must sum to 1");
  BusNetwork out = scale_loads(base, region, lambda);
  const double delta = (lambda - 1.0) * base.region_load_mw(region);
  for (std::size_t i = 0; i < out.buses.size(); ++i) out.buses[i].p_gen_mw += participation[i] * delta;
  return out;
}

HourLoadability find_lambda_star(const BusNetwork& base, Region region,
                                 const std::vector<double>& participation,
                                 const LoadabilityOptions& options, std::size_t hour) {
  if (!(options.step > 0.0)) throw std::invalid_argument("loadability step must be positive");
  if (options.coarse_factor < 1) throw std::invalid_argument("coarse factor must be >= 1");
  const auto kmax = static_cast<long>(std::floor((options.max_lambda - 1.0) / options.step + 1e-9));
  const long stride =
      options.scan == LoadabilityScan::CoarseToFine ? static_cast<long>(options.coarse_factor) : 1;

  HourLoadability out;
  out.hour = hour;
  PowerFlowSolution best;
  BusNetwork best_net;
  auto probe = [&](long k) {
    const double lambda = 1.0 + static_cast<double>(k) * options.step;
    auto net = stressed_network(base, region, participation, lambda);
    auto sol = solve_power_flow(net);
    if (!sol.converged) return false;
    best = std::move(sol);
    best_net = std::move(net);
    return true;
  };

  if (!probe(0)) return out;
  long k = 0;
  while (k + stride <= kmax && probe(k + stride)) k += stride;
  if (stride > 1) {
    while (k + 1 <= kmax && probe(k + 1)) ++k;
  }
  out.lambda_star = 1.0 + static_cast<double>(k) * options.step;
  out.served_load_mw = best_net.total_load_mw();
  out.region_load_mw = best_net.region_load_mw(region);
  out.min_voltage_pu = best.min_voltage();
  out.capped = k == kmax;
  return out;
}

LoadabilityResult compute_loadability(const std::vector<BusNetwork>& hourly, Region region,
                                      const std::vector<std::vector<double>>& participation,
                                      const LoadabilityOptions& options,
                                      const std::vector<std::size_t>& hour_index) {
  if (participation.size() != hourly.size()) {
    throw std::invalid_argument("one participation vector per hour required");
  }
  if (!hour_index.empty() && hour_index.size() != hourly.size()) {
    throw std::invalid_argument("hour index does not match the operating points");
  }
  LoadabilityResult result;
  result.step = options.step;
  result.hours.reserve(hourly.size());
  for (std::size_t i = 0; i < hourly.size(); ++i) {
    const std::size_t hour = hour_index.empty() ? i : hour_index[i];
    result.hours.push_back(find_lambda_star(hourly[i], region, participation[i], options, hour));
  }
  return result;
}

double average_loadability(const LoadabilityResult& result) {
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& h : result.hours) {
    if (!h.lambda_star) continue;
    sum += h.served_load_mw;
    ++defined;
  }
  if (defined == 0) throw LoadabilityError("every hour is degenerate; loadability undefined");
  return sum / static_cast<double>(defined) / 1000.0;
}

void write_loadability_csv(const LoadabilityResult& result, std::ostream& out) {
  out << "hour,lambda_star,served_load_MW,min_voltage_pu,region_load_MW\n";
  for (const auto& h : result.hours) {
    out << h.hour << ',';
    if (h.lambda_star) {
      out << format_exact(*h.lambda_star) << ',' << format_exact(h.served_load_mw) << ','
          << format_exact(h.min_voltage_pu) << ',' << format_exact(h.region_load_mw);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

}  // namespace gridstudy::powerflow
