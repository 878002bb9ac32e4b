#include "gridstudy/scenario/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "gridstudy/scenario/pipeline.hpp"

namespace gridstudy::scenario {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFixtureCycleHours = 8.0;

// std::normal_distribution is implementation-defined; the fixture must be
// byte-identical everywhere, so draws are built from raw engine output.
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view stream) : engine_(seed ^ fnv1a64(stream)) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

double round_to(double v, double quantum) { return std::round(v / quantum) * quantum; }

struct RegionProfile {
  Region region;
  double mean_mw;
  double summer;  // annual cosine amplitude, peak mid January
  double twice;   // semi-annual amplitude, peaks mid January and mid July
  double price_base;
};

constexpr RegionProfile kProfiles[] = {
    {Region::QLD, 5600.0, 0.05, 0.03, 24.0},
    {Region::NSW, 8100.0, 0.02, 0.06, 26.0},
    {Region::VIC, 5300.0, 0.00, 0.06, 21.0},
    {Region::SA, 1400.0, 0.04, 0.05, 29.0},
};

double diurnal(double h) {
  return 0.97 + 0.10 * std::exp(-(h - 8.0) * (h - 8.0) / 5.0) +
         0.20 * std::exp(-(h - 18.5) * (h - 18.5) / 7.0) -
         0.16 * std::exp(-(h - 3.5) * (h - 3.5) / 9.0);
}

/// Summer-weighted season indicator in [-1, 1], +1 at the solstice late in December.
double summerness(std::size_t day) { return std::cos(2.0 * kPi * (static_cast<double>(day) + 10.0) / 365.0); }

/// Clear-sky bell between sunrise and sunset, 0 at night.
double clear_sky(double h, std::size_t day) {
  const double c = summerness(day);
  const double rise = 6.0 - 0.8 * c;
  const double set = 18.0 + 0.8 * c;
  const double x = (h + 0.5 - rise) / (set - rise);
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::pow(std::sin(kPi * x), 1.3) * (0.82 + 0.18 * c);
}

struct Series {
  std::string file;
  std::string label;
  std::vector<double> values;
};

std::vector<double> demand_trace(const RegionProfile& p, std::size_t hours, HourStamp start,
                                 std::uint64_t seed) {
  Rng rng(seed, fmt::format("demand/{}", to_string(p.region)));
  std::vector<double> out(hours);
  double noise = 0.0;
  for (std::size_t t = 0; t < hours; ++t) {
    const std::size_t day = t / 24;
    const double h = static_cast<double>(t % 24);
    const double season = p.summer * std::cos(2.0 * kPi * (static_cast<double>(day) - 15.0) / 365.0) +
                          p.twice * std::cos(4.0 * kPi * (static_cast<double>(day) - 15.0) / 365.0);
    const int dow = day_of_week(start + std::chrono::hours(t));
    const double weekend = dow >= 5 ? 0.9 : 1.0;
    noise = 0.92 * noise + 0.011 * rng.normal();
    out[t] = round_to(p.mean_mw * (1.0 + season) * diurnal(h) * weekend * (1.0 + noise), 0.1);
  }
  return out;
}

std::vector<double> pv_trace(Region r, std::size_t hours, std::uint64_t seed) {
  Rng rng(seed, fmt::format("pv/{}", to_string(r)));
  std::vector<double> out(hours);
  double cloud = 1.0;
  for (std::size_t t = 0; t < hours; ++t) {
    if (t % 24 == 0) {
      const double u = rng.uniform();
      cloud = 1.0 - 0.6 * u * u;
    }
    out[t] = round_to(0.85 * clear_sky(static_cast<double>(t % 24), t / 24) * cloud, 1e-4);
  }
  return out;
}

std::vector<double> wind_trace(std::size_t hours, std::uint64_t seed) {
  Rng rng(seed, "wind/NSA");
  std::vector<double> out(hours);
  double z = 0.0;
  const double phi = 0.96;
  for (std::size_t t = 0; t < hours; ++t) {
    z = phi * z + std::sqrt(1.0 - phi * phi) * rng.normal();
    const double h = static_cast<double>(t % 24);
    const double cf = 0.36 + 0.20 * z + 0.16 * std::cos(2.0 * kPi * (h - 3.0) / 24.0);
    out[t] = round_to(std::clamp(cf, 0.0, 0.95), 1e-4);
  }
  return out;
}

std::vector<double> csp_trace(const std::string& zone, std::size_t hours, std::uint64_t seed) {
  Rng rng(seed, "csp/" + zone);
  std::vector<double> out(hours);
  double sky = 1.0;
  for (std::size_t t = 0; t < hours; ++t) {
    const std::size_t day = t / 24;
    if (t % 24 == 0) {
      const double u = rng.uniform();
      sky = 1.0 - 0.5 * u * u;
    }
    const double h = static_cast<double>(t % 24) + 0.5;
    const double c = summerness(day);
    const double x = (h - 5.0 + 0.5 * c) / (15.0 + c);
    const double shape = (x > 0.0 && x < 1.0) ? std::pow(std::sin(kPi * x), 0.6) : 0.0;
    const double cf = 0.18 + 0.50 * shape * sky * (0.85 + 0.15 * c);
    out[t] = round_to(std::clamp(cf, 0.0, 1.0), 1e-4);
  }
  return out;
}

std::vector<double> price_trace(const RegionProfile& p, const std::vector<double>& demand,
                                std::uint64_t seed) {
  Rng rng(seed, fmt::format("price/{}", to_string(p.region)));
  const double peak = *std::max_element(demand.begin(), demand.end());
  std::vector<double> out(demand.size());
  for (std::size_t t = 0; t < demand.size(); ++t) {
    const double x = demand[t] / peak;
    const double spike = x > 0.9 ? 400.0 * (x - 0.9) : 0.0;
    out[t] = round_to(p.price_base + 42.0 * x * x * x + spike + 2.5 * rng.normal(), 0.01);
  }
  return out;
}

struct BusRow {
  int id;
  const char* name;
  const char* type;
  const char* region;
  const char* zone;
  double p_load;
  double q_load;
  double v_set;
  const char* generators;
};

// Base loads only fix shares inside a zone and the power factor; hourly
// values come from regional demand.
constexpr BusRow kBuses[] = {
    {1, "NCEN", "slack", "NSW", "NCEN", 900.0, 300.0, 1.03, "VPS_2"},
    {2, "NNS", "pv", "NSW", "NNS", 1000.0, 330.0, 1.02, "BPS_2"},
    {3, "SWNSW", "pv", "NSW", "SWNSW", 700.0, 230.0, 1.02, "MPS_2"},
    {4, "CAN", "pv", "NSW", "CAN", 700.0, 230.0, 1.02, "EPS_2"},
    {5, "SYD", "pq", "NSW", "NCEN", 3200.0, 1050.0, 1.0, ""},
    {6, "SNOWY", "pv", "SH", "SNY", 0.0, 0.0, 1.02, "UPS_1"},
    {7, "LV", "pv", "VIC", "LV", 400.0, 130.0, 1.03, "YPS_3"},
    {8, "MEL", "pv", "VIC", "MEL", 600.0, 200.0, 1.02, "LPS_3"},
    {9, "MELB", "pq", "VIC", "MEL", 2600.0, 850.0, 1.0, ""},
    {10, "CVIC", "pq", "VIC", "CVIC", 700.0, 230.0, 1.0, ""},
    {11, "NQ", "pv", "QLD", "NQ", 900.0, 300.0, 1.02, "SPS_4;CSP_NQ"},
    {12, "CQ", "pv", "QLD", "CQ", 1000.0, 330.0, 1.03, "CPS_4;GPS_4;CSP_CQ"},
    {13, "SWQ", "pv", "QLD", "SWQ", 600.0, 200.0, 1.02, "TPS_4"},
    {14, "SEQ", "pq", "QLD", "SEQ", 2800.0, 920.0, 1.0, ""},
    {15, "NSA", "pv", "SA", "NSA", 150.0, 50.0, 1.02, "NPS_5;WF_NSA"},
    {16, "ADE", "pv", "SA", "ADE", 900.0, 300.0, 1.02, "TPS_5"},
    {17, "SESA", "pv", "SA", "SESA", 200.0, 65.0, 1.02, "PPS_5"},
};

struct BranchRow {
  int from;
  int to;
  double x;
};

constexpr BranchRow kBranches[] = {
    {1, 5, 0.004},  {1, 2, 0.010},  {1, 4, 0.010},  {4, 3, 0.010},  {1, 3, 0.012},
    {4, 6, 0.008},  {3, 10, 0.016}, {2, 13, 0.014}, {7, 9, 0.005},  {8, 9, 0.004},
    {9, 10, 0.010}, {7, 10, 0.012}, {11, 12, 0.012}, {12, 14, 0.010}, {12, 13, 0.010},
    {13, 14, 0.008}, {15, 16, 0.010}, {16, 17, 0.012}, {10, 17, 0.025},
};

struct UnitRow {
  const char* name;
  const char* type;
  const char* zone;
  const char* region;
  double capacity;
  double srmc;
  const char* availability;
};

constexpr UnitRow kBauFleet[] = {
    {"UPS_1", "hydro", "SNY", "SH", 2000.0, 55.0, ""},
    {"BPS_2", "black_coal", "NNS", "NSW", 2000.0, 28.45, ""},
    {"EPS_2", "gt", "CAN", "NSW", 4500.0, 69.20, ""},
    {"MPS_2", "black_coal", "SWNSW", "NSW", 2200.0, 27.43, ""},
    {"VPS_2", "black_coal", "NCEN", "NSW", 2600.0, 26.40, ""},
    {"LPS_3", "biomass", "MEL", "VIC", 3500.0, 39.50, ""},
    {"YPS_3", "brown_coal", "LV", "VIC", 6000.0, 21.88, ""},
    {"CPS_4", "black_coal", "CQ", "QLD", 3000.0, 26.14, ""},
    {"GPS_4", "black_coal", "CQ", "QLD", 2000.0, 26.14, ""},
    {"SPS_4", "black_coal", "NQ", "QLD", 1200.0, 32.74, ""},
    {"TPS_4", "gt", "SWQ", "QLD", 5000.0, 73.84, ""},
    {"NPS_5", "brown_coal", "NSA", "SA", 800.0, 30.89, ""},
    {"PPS_5", "brown_coal", "SESA", "SA", 600.0, 30.89, ""},
    {"TPS_5", "gt", "ADE", "SA", 2000.0, 69.20, ""},
};

constexpr UnitRow kRenewables[] = {
    {"WF_NSA", "wind", "NSA", "SA", 3000.0, 0.0, "wind_NSA"},
    {"CSP_NQ", "csp", "NQ", "QLD", 4500.0, 0.0, "csp_NQ"},
    {"CSP_CQ", "csp", "CQ", "QLD", 4500.0, 0.0, "csp_CQ"},
};

void unit_yaml(std::ostream& y, const UnitRow& u, const char* indent) {
  y << indent << "- {name: " << u.name << ", type: " << u.type << ", zone: " << u.zone
    << ", region: " << u.region << ", capacity_mw: " << format_exact(u.capacity)
    << ", srmc: " << format_exact(u.srmc);
  if (*u.availability) y << ", availability: " << u.availability;
  y << "}\n";
}

std::string scenario_yaml(int id, const FixtureOptions& o) {
  static constexpr const char* kUptake[] = {"", "none", "none", "low", "medium", "high"};
  static constexpr const char* kNames[] = {
      "", "business as usual", "renewables, conventional load", "renewables, low uptake",
      "renewables, medium uptake", "renewables, high uptake"};
  std::ostringstream y;
  y << "schema_version: 1\n";
  y << "scenario: " << id << '\n';
  y << "name: " << kNames[id] << '\n';
  y << "uptake: " << kUptake[id] << '\n';
  y << "calendar: {start: \"" << o.start << "\", hours: " << o.hours << "}\n";
  y << "data:\n";
  for (const char* kind : {"demand", "pv", "historical_price"}) {
    const char* prefix = std::string_view(kind) == "historical_price" ? "hist_price" : kind;
    y << "  " << kind << ": {";
    bool first = true;
    for (const auto& p : kProfiles) {
      y << (first ? "" : ", ") << to_string(p.region) << ": " << prefix << '_' << to_string(p.region)
        << ".csv";
      first = false;
    }
    y << "}\n";
  }
  y << "  availability: {wind_NSA: avail_wind_NSA.csv, csp_NQ: avail_csp_NQ.csv, "
       "csp_CQ: avail_csp_CQ.csv}\n";
  y << "  network: {buses: network_buses.csv, branches: network_branches.csv}\n";
  y << "battery_efficiency: 0.9\n";
  const auto uptake = parse_uptake(kUptake[id]);
  if (uptake && *uptake != Uptake::None) {
    // Catalog capacities with an explicit 8-hour full cycle instead of the 2-hour default.
    y << "storage:\n";
    for (const auto& p : kProfiles) {
      const StorageSpec s = *storage_catalog(p.region, *uptake);
      const double rate = (s.soc_max_mwh - s.soc_min_mwh) / kFixtureCycleHours;
      y << "  " << to_string(p.region) << ": {soc_min_mwh: " << format_exact(s.soc_min_mwh)
        << ", soc_max_mwh: " << format_exact(s.soc_max_mwh)
        << ", pv_capacity_mw: " << format_exact(s.pv_capacity_mw)
        << ", charge_rate_mw: " << format_exact(rate) << ", discharge_rate_mw: " << format_exact(-rate)
        << "}\n";
    }
  }
  y << "generators:\n";
  for (const auto& u : kBauFleet) unit_yaml(y, u, "  ");
  y << "interconnectors:\n";
  y << "  - {from: NSW, to: QLD, forward_mw: 600, reverse_mw: -1000}\n";
  y << "  - {from: NSW, to: VIC, forward_mw: 500, reverse_mw: -1500}\n";
  y << "  - {from: VIC, to: SA, forward_mw: 500, reverse_mw: -500}\n";
  y << "  - {from: SH, to: NSW, forward_mw: 2000, reverse_mw: -2000}\n";
  if (id > 1) {
    y << "replacement:\n";
    y << "  remove: [NPS_5, SPS_4, GPS_4]\n";
    y << "  csp_delay_hours: 12\n";
    y << "  add:\n";
    for (const auto& u : kRenewables) unit_yaml(y, u, "    ");
  }
  y << "zone_weights:\n";
  for (const auto& p : kProfiles) {
    const std::string region(to_string(p.region));
    std::map<std::string, double> zones;
    double total = 0.0;
    for (const auto& b : kBuses) {
      if (region == b.region && b.p_load > 0.0) {
        zones[b.zone] += b.p_load;
        total += b.p_load;
      }
    }
    y << "  " << region << ": {";
    bool first = true;
    for (const auto& [z, load] : zones) {
      y << (first ? "" : ", ") << z << ": " << format_exact(load / total);
      first = false;
    }
    y << "}\n";
  }
  y << "loadability: {region: QLD, step: 0.005, scan: coarse_to_fine, coarse_factor: 8, "
       "max_lambda: 10, hour_stride: 1}\n";
  y << "predictor: {kind: ridge, seed: 1, max_exemplars: 0}\n";
  return y.str();
}

}  // namespace

std::vector<std::string> write_fixture(const std::filesystem::path& dir, const FixtureOptions& o) {
  const HourStamp start = parse_timestamp(o.start);
  if (o.hours == 0 || o.hours % 24 != 0) throw std::invalid_argument("fixture hours must be whole days");
  std::filesystem::create_directories(dir / "scenarios");

  std::vector<Series> series;
  for (const auto& p : kProfiles) {
    const std::string r(to_string(p.region));
    auto demand = demand_trace(p, o.hours, start, o.seed);
    auto price = price_trace(p, demand, o.seed);
    series.push_back({"demand_" + r + ".csv", "demand_" + r + "_MW", std::move(demand)});
    series.push_back({"pv_" + r + ".csv", "pv_" + r + "_pu", pv_trace(p.region, o.hours, o.seed)});
    series.push_back({"hist_price_" + r + ".csv", "price_" + r, std::move(price)});
  }
  series.push_back({"avail_wind_NSA.csv", "wind_NSA_pu", wind_trace(o.hours, o.seed)});
  series.push_back({"avail_csp_NQ.csv", "csp_NQ_pu", csp_trace("NQ", o.hours, o.seed)});
  series.push_back({"avail_csp_CQ.csv", "csp_CQ_pu", csp_trace("CQ", o.hours, o.seed)});

  std::vector<std::string> written;
  for (auto& s : series) {
    write_timeseries_csv(TimeSeries(start, std::move(s.values), s.label), dir / s.file);
    written.push_back(s.file);
  }

  {
    std::ofstream out(dir / "network_buses.csv", std::ios::binary);
    out << "id,name,type,region,zone,p_load_mw,q_load_mvar,p_gen_mw,v_set_pu,generators\n";
    for (const auto& b : kBuses) {
      out << b.id << ',' << b.name << ',' << b.type << ',' << b.region << ',' << b.zone << ','
          << format_exact(b.p_load) << ',' << format_exact(b.q_load) << ",0," << format_exact(b.v_set)
          << ',' << b.generators << '\n';
    }
    if (!out) throw std::runtime_error("cannot write network_buses.csv");
    written.push_back("network_buses.csv");
  }
  {
    std::ofstream out(dir / "network_branches.csv", std::ios::binary);
    out << "from,to,r_pu,x_pu,b_pu\n";
    for (const auto& br : kBranches) {
      out << br.from << ',' << br.to << ',' << format_exact(round_to(br.x / 10.0, 1e-5)) << ','
          << format_exact(br.x) << ",0.05\n";
    }
    if (!out) throw std::runtime_error("cannot write network_branches.csv");
    written.push_back("network_branches.csv");
  }
  for (int id = 1; id <= 5; ++id) {
    const std::string file = fmt::format("scenarios/scenario_{}.yaml", id);
    std::ofstream out(dir / file, std::ios::binary);
    out << scenario_yaml(id, o);
    if (!out) throw std::runtime_error("cannot write " + file);
    written.push_back(file);
  }
  return written;
}

}  // namespace gridstudy::scenario
