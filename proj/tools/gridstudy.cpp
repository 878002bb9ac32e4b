// gridstudy: command-line driver for the scenario pipeline and its stages.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gridstudy/demand/demand_model.hpp"
#include "gridstudy/market/dispatch.hpp"
#include "gridstudy/market/report_io.hpp"
#include "gridstudy/powerflow/loadability.hpp"
#include "gridstudy/scenario/fixture.hpp"
#include "gridstudy/scenario/pipeline.hpp"
#include "gridstudy/scenario/report.hpp"

namespace fs = std::filesystem;
using namespace gridstudy;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

int fail(const std::string& tag, const std::string& what) {
  std::cerr << "gridstudy: error [" << tag << "] " << what << '\n';
  return 2;
}

struct RunArgs {
  std::string scenario;
  std::string data_dir;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const RunArgs& a) {
  ScenarioConfig cfg;
  std::uint64_t hash = 0;
  try {
    hash = scenario::fnv1a64(read_file(a.scenario));
    cfg = scenario_from_config(a.scenario);
  } catch (const ConfigError& e) {
    return fail("config", e.what());
  } catch (const std::exception& e) {
    return fail("config", e.what());
  }
  scenario::RunOptions opt;
  opt.data_dir = a.data_dir;
  opt.seed = a.seed;
  opt.config_hash = hash;
  opt.partial_dir = fs::path(a.out) / "partial";
  try {
    const auto report = scenario::run_scenario(cfg, opt);
    scenario::emit_report(report, a.out);
    std::cout << fmt::format(
        "scenario {}: spilled {:.4f} TWh ({:.2f}% of hours), GT {:.4f} TWh, unserved {:.6f} TWh, "
        "loadability {:.3f} GW\n",
        report.scenario_id, report.spilled_energy_twh, report.spilled_hours_pct,
        report.gt_energy_twh, report.unserved_energy_twh, report.loadability_gw);
  } catch (const scenario::StageError& e) {
    return fail(scenario::to_string(e.stage()), e.what());
  } catch (const std::exception& e) {
    return fail("report", e.what());
  }
  return 0;
}

struct DemandArgs {
  std::string load, pv, price, out, schedules;
  double soc_min = 0.0, soc_max = 0.0, pv_capacity = 0.0;
  std::optional<double> charge, discharge;
  double efficiency = demand::kDefaultEfficiency;
};

int cmd_demand(const DemandArgs& a) {
  try {
    const auto load = load_timeseries_csv(a.load, 0);
    const auto price = load_timeseries_csv(a.price, load.size());
    const auto pv = a.pv.empty() ? TimeSeries(load.start(), std::vector<double>(load.size(), 0.0), "pv")
                                 : load_timeseries_csv(a.pv, load.size());
    if (load.size() % demand::kHoursPerDay != 0) throw DataError("series must cover whole days");
    std::vector<demand::DemandSchedule> days;
    for (std::size_t t0 = 0; t0 < load.size(); t0 += demand::kHoursPerDay) {
      demand::DayInputs day;
      for (std::size_t t = t0; t < t0 + demand::kHoursPerDay; ++t) {
        day.price.push_back(price[t]);
        day.load.push_back(load[t]);
        day.pv.push_back(a.pv_capacity * pv[t]);
      }
      auto params = demand::DemandParams::with_defaults(
          a.soc_min, a.soc_max, a.pv_capacity, *std::max_element(day.load.begin(), day.load.end()),
          a.efficiency);
      if (a.charge) params.charge_rate_mw = *a.charge;
      if (a.discharge) params.discharge_rate_mw = *a.discharge;
      days.push_back(demand::solve_day(params, day));
      if (!a.schedules.empty()) {
        auto out = open_out(fs::path(a.schedules) / fmt::format("day_{:03}.csv", t0 / 24));
        demand::write_schedule_csv(day, days.back(), out);
      }
    }
    const auto nett = demand::aggregate_nett_demand({{Region::NSW, days}}, load.start());
    write_timeseries_csv(nett.begin()->second.relabeled("nett_demand_MW"), fs::path(a.out));
  } catch (const std::exception& e) {
    return fail("demand", e.what());
  }
  return 0;
}

struct DispatchArgs {
  std::string scenario, data_dir, out;
  std::vector<std::string> nett;
};

int cmd_dispatch(const DispatchArgs& a) {
  try {
    const auto cfg = scenario_from_config(a.scenario);
    const auto data = scenario::load_scenario_data(cfg, a.data_dir);
    const auto bau = market::make_fleet(cfg.generators, data.availability);
    const auto fleet = scenario::apply_renewable_replacement(bau, cfg, data.availability);
    const auto lines = market::make_interconnectors(cfg.interconnectors);
    auto demand = data.demand;
    for (const auto& spec : a.nett) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--nett expects REGION=file");
      const Region r = region_from_string(spec.substr(0, eq));
      demand.insert_or_assign(r, load_timeseries_csv(spec.substr(eq + 1), cfg.hours));
    }
    const auto result = market::simulate_horizon(fleet, demand, lines);
    fs::create_directories(a.out);
    auto hourly = open_out(fs::path(a.out) / "dispatch_hourly.csv");
    market::write_dispatch_hourly_csv(fleet, lines, result, cfg.start, hourly);
    auto summary = open_out(fs::path(a.out) / "dispatch_summary.csv");
    market::write_dispatch_summary_csv(result, std::nullopt, summary);
  } catch (const std::exception& e) {
    return fail("dispatch", e.what());
  }
  return 0;
}

struct LoadabilityArgs {
  std::string buses, branches, region = "QLD", out, scan = "coarse_to_fine";
  double step = 0.005, max_lambda = 10.0, base_mva = powerflow::kDefaultBaseMva;
  int coarse_factor = 8;
};

int cmd_loadability(const LoadabilityArgs& a) {
  try {
    const auto net = powerflow::load_network(a.buses, a.branches, a.base_mva);
    LoadabilityOptions opt;
    opt.region = region_from_string(a.region);
    opt.step = a.step;
    opt.max_lambda = a.max_lambda;
    opt.coarse_factor = a.coarse_factor;
    if (a.scan == "linear") {
      opt.scan = LoadabilityScan::Linear;
    } else if (a.scan != "coarse_to_fine") {
      throw std::invalid_argument("scan must be linear or coarse_to_fine");
    }
    std::vector<double> units(net.buses.size(), 0.0);
    for (std::size_t b = 0; b < net.buses.size(); ++b) {
      const auto& bus = net.buses[b];
      if (bus.region == opt.region && bus.type == powerflow::BusType::PV) {
        units[b] = static_cast<double>(bus.generators.size());
      }
    }
    const auto share = powerflow::equal_participation(net, units);
    powerflow::LoadabilityResult result;
    result.step = opt.step;
    result.hours.push_back(powerflow::find_lambda_star(net, opt.region, share, opt));
    if (a.out.empty()) {
      powerflow::write_loadability_csv(result, std::cout);
    } else {
      auto out = open_out(a.out);
      powerflow::write_loadability_csv(result, out);
    }
  } catch (const std::exception& e) {
    return fail("loadability", e.what());
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out_path) {
  try {
    std::vector<fs::path> paths(dirs.begin(), dirs.end());
    const auto rows = scenario::merge_reports(paths);
    if (out_path.empty()) {
      scenario::write_summary_csv(rows, std::cout);
    } else {
      auto out = open_out(out_path);
      scenario::write_summary_csv(rows, out);
    }
  } catch (const std::exception& e) {
    return fail("report", e.what());
  }
  return 0;
}

int cmd_fixture(const std::string& out, std::uint64_t seed) {
  try {
    scenario::FixtureOptions opt;
    opt.seed = seed;
    for (const auto& f : scenario::write_fixture(out, opt)) std::cout << f << '\n';
  } catch (const std::exception& e) {
    return fail("fixture", e.what());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Price-responsive demand, market dispatch and loadability study"};
  app.require_subcommand(1);
  int status = 0;

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario end to end and write its report");
  run_cmd->add_option("--scenario", run.scenario, "Scenario YAML")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--data-dir", run.data_dir, "Directory holding the data files")->required();
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--seed", run.seed, "Predictor seed (overrides the config)");
  run_cmd->callback([&] { status = cmd_run(run); });

  DemandArgs dem;
  auto* dem_cmd = app.add_subcommand("demand", "Schedule PV and storage against a price series");
  dem_cmd->add_option("--load", dem.load, "Load CSV (MW)")->required();
  dem_cmd->add_option("--price", dem.price, "Price CSV ($/MWh)")->required();
  dem_cmd->add_option("--pv", dem.pv, "Rooftop PV CSV (per unit of capacity)");
  dem_cmd->add_option("--soc-min", dem.soc_min, "Minimum state of charge (MWh)")->required();
  dem_cmd->add_option("--soc-max", dem.soc_max, "Maximum state of charge (MWh)")->required();
  dem_cmd->add_option("--pv-capacity", dem.pv_capacity, "PV capacity (MW)");
  dem_cmd->add_option("--charge-rate", dem.charge, "Charge limit (MW, >= 0)");
  dem_cmd->add_option("--discharge-rate", dem.discharge, "Discharge limit (MW, <= 0)");
  dem_cmd->add_option("--efficiency", dem.efficiency, "Battery efficiency");
  dem_cmd->add_option("--out", dem.out, "Nett demand CSV")->required();
  dem_cmd->add_option("--schedules", dem.schedules, "Directory for per-day schedule CSVs");
  dem_cmd->callback([&] { status = cmd_demand(dem); });

  DispatchArgs dis;
  auto* dis_cmd = app.add_subcommand("dispatch", "Dispatch a scenario fleet over a demand year");
  dis_cmd->add_option("--scenario", dis.scenario, "Scenario YAML")->required()->check(CLI::ExistingFile);
  dis_cmd->add_option("--data-dir", dis.data_dir, "Directory holding the data files")->required();
  dis_cmd->add_option("--nett", dis.nett, "REGION=file replacing that region's demand");
  dis_cmd->add_option("--out", dis.out, "Output directory")->required();
  dis_cmd->callback([&] { status = cmd_dispatch(dis); });

  LoadabilityArgs lo;
  auto* lo_cmd = app.add_subcommand("loadability", "Loadability of one network operating point");
  lo_cmd->add_option("--buses", lo.buses, "Bus CSV")->required();
  lo_cmd->add_option("--branches", lo.branches, "Branch CSV")->required();
  lo_cmd->add_option("--region", lo.region, "Region whose loads are scaled");
  lo_cmd->add_option("--step", lo.step, "Relative load step");
  lo_cmd->add_option("--scan", lo.scan, "linear or coarse_to_fine");
  lo_cmd->add_option("--coarse-factor", lo.coarse_factor, "Fine steps per coarse step");
  lo_cmd->add_option("--max-lambda", lo.max_lambda, "Largest load scale tried");
  lo_cmd->add_option("--base-mva", lo.base_mva, "System base (MVA)");
  lo_cmd->add_option("--out", lo.out, "Output CSV (stdout if omitted)");
  lo_cmd->callback([&] { status = cmd_loadability(lo); });

  std::vector<std::string> merge;
  std::string report_out;
  auto* rep_cmd = app.add_subcommand("report", "Merge scenario summaries into one table");
  rep_cmd->add_option("--merge", merge, "Scenario output directories")->required();
  rep_cmd->add_option("--out", report_out, "Output CSV (stdout if omitted)");
  rep_cmd->callback([&] { status = cmd_report(merge, report_out); });

  std::string fixture_out;
  std::uint64_t fixture_seed = scenario::kFixtureSeed;
  auto* fix_cmd = app.add_subcommand("fixture", "Regenerate the bundled synthetic data set");
  fix_cmd->add_option("--out", fixture_out, "Output directory")->required();
  fix_cmd->add_option("--seed", fixture_seed, "Generator seed");
  fix_cmd->callback([&] { status = cmd_fixture(fixture_out, fixture_seed); });

  CLI11_PARSE(app, argc, argv);
  return status;
}
