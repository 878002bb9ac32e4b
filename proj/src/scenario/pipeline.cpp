#include "gridstudy/scenario/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "gridstudy/demand/demand_model.hpp"
#include "gridstudy/price/features.hpp"
#include "gridstudy/price/predictor.hpp"
#include "gridstudy/scenario/report.hpp"

namespace gridstudy::scenario {

namespace {

using market::Fleet;
using powerflow::BusNetwork;

constexpr std::size_t kUnmapped = static_cast<std::size_t>(-1);

TimeSeries load_series(const std::filesystem::path& dir, const std::string& file,
                       const ScenarioConfig& cfg) {
  auto ts = load_timeseries_csv(dir / file, cfg.hours);
  if (ts.start() != cfg.start) {
    throw DataError(fmt::format("{}: starts at {}, expected {}", file, format_timestamp(ts.start()),
                                format_timestamp(cfg.start)));
  }
  return ts;
}

std::vector<price::LineLimit> line_limits(const std::vector<market::Interconnector>& lines) {
  std::vector<price::LineLimit> out;
  for (const auto& l : lines) out.push_back({l.name(), l.forward_mw, l.reverse_mw});
  return out;
}

std::vector<std::string> line_names(const std::vector<market::Interconnector>& lines) {
  std::vector<std::string> out;
  for (const auto& l : lines) out.push_back(l.name());
  return out;
}

price::FeatureVector features_at(const Fleet& fleet, const std::vector<price::LineLimit>& lines,
                                 double demand, HourStamp time, std::size_t hour) {
  std::vector<price::UnitCapacity> units;
  units.reserve(fleet.size());
  for (const auto& g : fleet) units.push_back({g.type, g.region, std::max(0.0, g.available_mw(hour))});
  price::SystemSnapshot snap;
  snap.time = time;
  snap.demand_forecast_mw = demand;
  snap.fleet = std::move(units);
  snap.lines = lines;
  return price::extract_features(snap);
}

/// Per-region nett or conventional demand as dispatch input for hour t.
market::RegionalDemand demand_at(const std::map<Region, TimeSeries>& series, std::size_t t) {
  market::RegionalDemand d{};
  for (const auto& [r, ts] : series) d[index_of(r)] = ts[t];
  return d;
}

/// Bus position of each fleet unit: listed at a bus, else the first
/// generator bus in its zone, else the first generator bus in its region.
std::vector<std::size_t> map_generators(const BusNetwork& net, const Fleet& fleet) {
  std::vector<std::size_t> out(fleet.size(), kUnmapped);
  for (std::size_t g = 0; g < fleet.size(); ++g) {
    for (std::size_t b = 0; b < net.buses.size() && out[g] == kUnmapped; ++b) {
      const auto& names = net.buses[b].generators;
      if (std::find(names.begin(), names.end(), fleet[g].name) != names.end()) out[g] = b;
    }
    for (std::size_t b = 0; b < net.buses.size() && out[g] == kUnmapped; ++b) {
      const auto& bus = net.buses[b];
      if (bus.type != powerflow::BusType::PQ && bus.zone == fleet[g].zone) out[g] = b;
    }
    for (std::size_t b = 0; b < net.buses.size() && out[g] == kUnmapped; ++b) {
      const auto& bus = net.buses[b];
      if (bus.type != powerflow::BusType::PQ && bus.region == fleet[g].region) out[g] = b;
    }
    if (out[g] == kUnmapped) {
      throw std::invalid_argument(fleet[g].name + ": no generator bus in its zone or region");
    }
  }
  return out;
}

/// Share of each region's load carried by each bus.
std::vector<double> load_shares(const BusNetwork& net, const ScenarioConfig& cfg) {
  std::vector<double> share(net.buses.size(), 0.0);
  for (Region r : kAllRegions) {
    std::map<std::string, double> zone_load;
    for (const auto& b : net.buses) {
      if (b.region == r && b.p_load_mw > 0.0) zone_load[b.zone] += b.p_load_mw;
    }
    if (zone_load.empty()) continue;
    std::vector<std::string> zones;
    for (const auto& [z, p] : zone_load) zones.push_back(z);
    const auto it = cfg.zone_weights.find(r);
    const ZoneWeights weights = it != cfg.zone_weights.end() ? ZoneWeights(it->second)
                                                             : ZoneWeights::equal(zones);
    for (const auto& [z, w] : weights.weights()) {
      if (!zone_load.contains(z)) {
        throw std::invalid_argument(
            fmt::format("zone weight for {} names zone '{}' without load buses", to_string(r), z));
      }
    }
    for (std::size_t b = 0; b < net.buses.size(); ++b) {
      const auto& bus = net.buses[b];
      if (bus.region != r || bus.p_load_mw <= 0.0) continue;
      const auto w = weights.weights().find(bus.zone);
      if (w != weights.weights().end()) share[b] = w->second * bus.p_load_mw / zone_load[bus.zone];
    }
  }
  return share;
}

struct OperatingPoint {
  BusNetwork net;
  std::vector<double> units;  // participating units per bus
};

OperatingPoint operating_point(const BusNetwork& base, const std::vector<double>& shares,
                               const std::vector<std::size_t>& gen_bus, const Fleet& fleet,
                               const market::HourDispatch& h, Region stressed) {
  OperatingPoint op{base, std::vector<double>(base.buses.size(), 0.0)};
  for (std::size_t b = 0; b < base.buses.size(); ++b) {
    auto& bus = op.net.buses[b];
    const std::size_t r = index_of(bus.region);
    const double served = h.demand_mw[r] - h.unserved_mw[r];
    const double pf_ratio = bus.p_load_mw > 0.0 ? bus.q_load_mvar / bus.p_load_mw : 0.0;
    bus.p_load_mw = shares[b] * served;
    bus.q_load_mvar = std::abs(bus.p_load_mw) * pf_ratio;
    bus.p_gen_mw = 0.0;
  }
  // Spill comes off renewable output first, then off the other units.
  RegionArray<double> renewable{};
  RegionArray<double> other{};
  for (std::size_t g = 0; g < fleet.size(); ++g) {
    (fleet[g].renewable() ? renewable : other)[index_of(fleet[g].region)] += h.output_mw[g];
  }
  for (std::size_t g = 0; g < fleet.size(); ++g) {
    const std::size_t r = index_of(fleet[g].region);
    const double from_renewable = std::min(h.dumped_mw[r], renewable[r]);
    const double rest = h.dumped_mw[r] - from_renewable;
    double out = h.output_mw[g];
    if (fleet[g].renewable()) {
      if (renewable[r] > 0.0) out -= from_renewable * h.output_mw[g] / renewable[r];
    } else if (other[r] > 0.0) {
      out -= rest * h.output_mw[g] / other[r];
    }
    op.net.buses[gen_bus[g]].p_gen_mw += out;
    if (fleet[g].region == stressed && !fleet[g].renewable() && h.output_mw[g] > 0.0) {
      op.units[gen_bus[g]] += 1.0;
    }
  }
  if (std::accumulate(op.units.begin(), op.units.end(), 0.0) == 0.0) {
    for (std::size_t g = 0; g < fleet.size(); ++g) {
      if (fleet[g].region == stressed && !fleet[g].renewable()) op.units[gen_bus[g]] += 1.0;
    }
  }
  return op;
}

template <typename Fn>
auto run_stage(Stage stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

const char* to_string(Stage s) {
  switch (s) {
    case Stage::Inputs: return "inputs";
    case Stage::Fleet: return "fleet";
    case Stage::PassZero: return "pass0-dispatch";
    case Stage::Training: return "training";
    case Stage::Prediction: return "prediction";
    case Stage::Demand: return "demand";
    case Stage::Dispatch: return "dispatch";
    case Stage::Loadability: return "loadability";
    case Stage::Report: return "report";
  }
  return "unknown";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ScenarioData load_scenario_data(const ScenarioConfig& cfg, const std::filesystem::path& dir) {
  return run_stage(Stage::Inputs, [&] {
    ScenarioData d;
    for (const auto& [r, f] : cfg.data.demand) d.demand.emplace(r, load_series(dir, f, cfg));
    for (const auto& [r, f] : cfg.data.pv) d.pv.emplace(r, load_series(dir, f, cfg));
    for (const auto& [r, f] : cfg.data.historical_price) {
      d.historical_price.emplace(r, load_series(dir, f, cfg));
    }
    for (const auto& [k, f] : cfg.data.availability) d.availability.emplace(k, load_series(dir, f, cfg));
    d.network = powerflow::load_network(dir / cfg.data.network_buses, dir / cfg.data.network_branches);
    return d;
  });
}

Fleet apply_renewable_replacement(const Fleet& fleet, const ScenarioConfig& cfg,
                                  const std::map<std::string, TimeSeries>& availability) {
  if (cfg.scenario_id == 1) return fleet;
  if (!cfg.replacement) {
    throw std::invalid_argument(fmt::format("scenario {} needs a replacement block", cfg.scenario_id));
  }
  const auto& rep = *cfg.replacement;
  Fleet out;
  for (const auto& name : rep.remove) {
    if (std::none_of(fleet.begin(), fleet.end(), [&](const auto& g) { return g.name == name; })) {
      throw std::invalid_argument("replacement removes unknown unit " + name);
    }
  }
  for (const auto& g : fleet) {
    if (std::find(rep.remove.begin(), rep.remove.end(), g.name) == rep.remove.end()) out.push_back(g);
  }
  for (const auto& spec : rep.add) {
    auto g = market::make_generator(spec, availability);
    if (g.type == GenType::Csp && g.availability) {
      g.availability = market::csp_profile_shift(*g.availability, rep.csp_delay_hours);
    }
    out.push_back(std::move(g));
  }
  return out;
}

double renewable_share(const Fleet& fleet, const market::DispatchResult& dispatch) {
  double renewable = 0.0;
  double generated = 0.0;
  for (std::size_t g = 0; g < fleet.size(); ++g) {
    generated += dispatch.generator_energy_mwh[g];
    if (fleet[g].renewable()) renewable += dispatch.generator_energy_mwh[g];
  }
  const double spilled = dispatch.spilled_energy_twh * 1e6;
  const double served = generated - spilled;
  return served > 0.0 ? (renewable - spilled) / served : 0.0;
}

double top_decile_price_imports(const ScenarioReport& report) {
  double total = 0.0;
  for (const auto& [r, price] : report.price) {
    const auto nett = report.nett_demand.find(r);
    if (nett == report.nett_demand.end()) continue;
    std::vector<std::size_t> order(price.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return price[a] > price[b]; });
    const std::size_t top = order.size() / 10;
    for (std::size_t i = 0; i < top; ++i) total += std::max(0.0, nett->second[order[i]]);
  }
  return total;
}

std::vector<std::size_t> secondary_peak_days(const ScenarioReport& report) {
  std::set<std::size_t> days;
  for (const auto& [r, price] : report.price) {
    const auto nett = report.nett_demand.find(r);
    if (nett == report.nett_demand.end()) continue;
    for (std::size_t d = 0; d * 24 + 24 <= price.size(); ++d) {
      std::size_t peak = d * 24;
      double cheapest = price[d * 24];
      for (std::size_t t = d * 24; t < d * 24 + 24; ++t) {
        if (nett->second[t] > nett->second[peak]) peak = t;
        cheapest = std::min(cheapest, price[t]);
      }
      if (price[peak] <= cheapest) days.insert(d);
    }
  }
  return {days.begin(), days.end()};
}

ScenarioReport run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  const auto data = load_scenario_data(cfg, options.data_dir);
  return run_scenario(cfg, data, options);
}

ScenarioReport run_scenario(const ScenarioConfig& cfg, const ScenarioData& data,
                            const RunOptions& options) {
  ScenarioReport report;
  report.scenario_id = cfg.scenario_id;
  report.name = cfg.name;
  report.seed = options.seed.value_or(cfg.predictor.seed);
  report.config_hash = options.config_hash;
  report.start = cfg.start;
  const std::size_t hours = cfg.hours;

  try {
    const Fleet bau = run_stage(Stage::Fleet, [&] {
      validate(cfg);
      return market::make_fleet(cfg.generators, data.availability);
    });
    report.fleet = run_stage(Stage::Fleet, [&] {
      return apply_renewable_replacement(bau, cfg, data.availability);
    });
    report.lines = run_stage(Stage::Fleet, [&] { return market::make_interconnectors(cfg.interconnectors); });
    for (const auto& [r, ts] : data.demand) {
      report.conventional_demand.emplace(r, ts.relabeled(fmt::format("conventional_{}_MW", to_string(r))));
    }

    // Pass 0: the scenario fleet serving conventional demand.
    const auto pass0 = run_stage(Stage::PassZero, [&] {
      return market::simulate_horizon(report.fleet, report.conventional_demand, report.lines);
    });

    const auto limits = line_limits(report.lines);
    const auto names = line_names(report.lines);
    std::map<Region, price::TrainedPredictor> models;
    run_stage(Stage::Training, [&] {
      for (Region r : kDemandRegions) {
        price::TrainingSet set;
        set.line_names = names;
        const auto& demand = data.demand.at(r);
        const auto& hist = data.historical_price.at(r);
        for (std::size_t t = 0; t < hours; ++t) {
          set.samples.push_back({features_at(bau, limits, demand[t], demand.timestamp_at(t), t),
                                 hist[t], price::Provenance::Historical});
        }
        for (std::size_t t = 0; t < hours; ++t) {
          set.samples.push_back(
              {features_at(report.fleet, limits, demand[t], demand.timestamp_at(t), t),
               pass0.hours[t].price[index_of(r)], price::Provenance::Simulated});
        }
        models.emplace(r, price::train(set, cfg.predictor.kind, report.seed,
                                       cfg.predictor.max_exemplars));
      }
      return 0;
    });

    run_stage(Stage::Prediction, [&] {
      for (Region r : kDemandRegions) {
        const auto& demand = data.demand.at(r);
        std::vector<double> p(hours);
        for (std::size_t t = 0; t < hours; ++t) {
          p[t] = price::predict(models.at(r),
                                features_at(report.fleet, limits, demand[t], demand.timestamp_at(t), t));
        }
        report.price.emplace(r, TimeSeries(cfg.start, std::move(p),
                                           fmt::format("price_{}", to_string(r))));
      }
      return 0;
    });

    run_stage(Stage::Demand, [&] {
      if (!cfg.demand_response()) {
        for (const auto& [r, ts] : data.demand) {
          report.nett_demand.emplace(r, ts.relabeled(fmt::format("nett_demand_{}_MW", to_string(r))));
        }
        return 0;
      }
      std::map<Region, std::vector<demand::DemandSchedule>> schedules;
      for (Region r : kDemandRegions) {
        const auto& st = cfg.storage.at(r);
        const auto& load = data.demand.at(r);
        const auto& pv = data.pv.at(r);
        const auto& price = report.price.at(r);
        auto& out = schedules[r];
        for (std::size_t d = 0; d * demand::kHoursPerDay < hours; ++d) {
          const std::size_t t0 = d * demand::kHoursPerDay;
          demand::DayInputs day;
          for (std::size_t t = t0; t < t0 + demand::kHoursPerDay; ++t) {
            day.price.push_back(price[t]);
            day.load.push_back(load[t]);
            day.pv.push_back(st.pv_capacity_mw * pv[t]);
          }
          const double peak = *std::max_element(day.load.begin(), day.load.end());
          auto params = demand::DemandParams::with_defaults(st.soc_min_mwh, st.soc_max_mwh,
                                                            st.pv_capacity_mw, peak,
                                                            cfg.battery_efficiency);
          if (st.charge_rate_mw) params.charge_rate_mw = *st.charge_rate_mw;
          if (st.discharge_rate_mw) params.discharge_rate_mw = *st.discharge_rate_mw;
          try {
            out.push_back(demand::solve_day(params, day));
          } catch (const demand::InfeasibleDay& e) {
            throw std::runtime_error(fmt::format("{} day {}: {}", to_string(r), d, e.what()));
          }
        }
      }
      report.nett_demand = demand::aggregate_nett_demand(schedules, cfg.start);
      return 0;
    });

    run_stage(Stage::Dispatch, [&] {
      if (!cfg.demand_response()) {
        report.dispatch = pass0;  // same fleet, same demand
        return 0;
      }
      report.dispatch.hours.reserve(hours);
      for (std::size_t t = 0; t < hours; ++t) {
        const auto d = demand_at(report.nett_demand, t);
        const auto c = market::commit_merit_order(report.fleet, d, t, report.lines);
        report.dispatch.hours.push_back(market::dispatch_hour(report.fleet, c, d, report.lines, t));
      }
      market::aggregate_totals(report.fleet, report.dispatch);
      return 0;
    });
    report.spilled_energy_twh = report.dispatch.spilled_energy_twh;
    report.spilled_hours_pct = report.dispatch.spilled_hours_pct;
    report.gt_energy_twh = report.dispatch.gt_energy_twh;
    report.unserved_energy_twh = report.dispatch.unserved_energy_twh;
    report.unserved_hours = report.dispatch.unserved_hours;
    report.renewable_share = renewable_share(report.fleet, report.dispatch);

    run_stage(Stage::Loadability, [&] {
      const auto& opt = cfg.loadability;
      const auto shares = load_shares(data.network, cfg);
      const auto gen_bus = map_generators(data.network, report.fleet);
      report.loadability.step = opt.step;
      const auto stride = static_cast<std::size_t>(std::max(1, opt.hour_stride));
      for (std::size_t t = 0; t < hours; t += stride) {
        const auto op = operating_point(data.network, shares, gen_bus, report.fleet,
                                        report.dispatch.hours[t], opt.region);
        const auto share = powerflow::equal_participation(op.net, op.units);
        report.loadability.hours.push_back(
            powerflow::find_lambda_star(op.net, opt.region, share, opt, t));
      }
      report.loadability_gw = powerflow::average_loadability(report.loadability);
      return 0;
    });
  } catch (const StageError&) {
    if (options.partial_dir) {
      try {
        emit_partial(report, *options.partial_dir);
      } catch (const std::exception&) {
        // the stage error is the diagnostic that matters
      }
    }
    throw;
  }
  return report;
}

}  // namespace gridstudy::scenario
