#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gridstudy/market/fleet.hpp"
#include "gridstudy/scenario/fixture.hpp"
#include "gridstudy/scenario/pipeline.hpp"
#include "gridstudy/scenario/report.hpp"

using namespace gridstudy;
using namespace gridstudy::scenario;
namespace fs = std::filesystem;

namespace {

const fs::path kData = GRIDSTUDY_DATA_DIR;
const fs::path kTmp = GRIDSTUDY_TEST_TMP;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = kTmp / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Two weeks of synthetic data, generated once per process.
const fs::path& short_fixture() {
  static const fs::path dir = [] {
    const auto d = fresh_dir("fixture_336");
    FixtureOptions o;
    o.hours = 336;
    write_fixture(d, o);
    return d;
  }();
  return dir;
}

ScenarioConfig short_config(int id) {
  auto cfg = scenario_from_config(short_fixture() / "scenarios" / ("scenario_" + std::to_string(id) + ".yaml"));
  cfg.loadability.hour_stride = 24;
  return cfg;
}

ScenarioReport run_short(int id) {
  RunOptions o;
  o.data_dir = short_fixture();
  return run_scenario(short_config(id), o);
}

market::Fleet base_fleet(const ScenarioConfig& cfg, const ScenarioData& data) {
  return market::make_fleet(cfg.generators, data.availability);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  std::string cell;
  while (std::getline(s, cell, ',')) out.push_back(cell);
  return out;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("fixture regeneration reproduces the bundled data") {
  const auto dir = fresh_dir("fixture_full");
  const auto files = write_fixture(dir);
  CHECK(files.size() >= 20);
  for (const auto& f : files) {
    INFO(f);
    CHECK(slurp(dir / f) == slurp(kData / f));
  }
}

TEST_CASE("fixture rejects partial days") {
  FixtureOptions o;
  o.hours = 30;
  CHECK_THROWS(write_fixture(fresh_dir("fixture_bad"), o));
}

TEST_CASE("renewable replacement") {
  const auto cfg1 = scenario_from_config(kData / "scenarios" / "scenario_1.yaml");
  const auto cfg2 = scenario_from_config(kData / "scenarios" / "scenario_2.yaml");
  const auto data = load_scenario_data(cfg2, kData);

  SUBCASE("scenario 1 keeps the fleet") {
    const auto fleet = base_fleet(cfg1, data);
    const auto out = apply_renewable_replacement(fleet, cfg1, data.availability);
    REQUIRE(out.size() == fleet.size());
    for (std::size_t g = 0; g < fleet.size(); ++g) {
      CHECK(out[g].name == fleet[g].name);
      CHECK(out[g].capacity_mw == fleet[g].capacity_mw);
      CHECK(out[g].srmc == fleet[g].srmc);
    }
  }
  SUBCASE("scenario 2 swaps three coal units for wind and CSP") {
    const auto fleet = base_fleet(cfg2, data);
    const auto out = apply_renewable_replacement(fleet, cfg2, data.availability);
    auto find = [&](const std::string& n) {
      return std::find_if(out.begin(), out.end(), [&](const auto& g) { return g.name == n; });
    };
    for (const char* gone : {"NPS_5", "SPS_4", "GPS_4"}) CHECK(find(gone) == out.end());
    double wind = 0.0;
    std::vector<double> csp;
    for (const auto& g : out) {
      if (g.type == GenType::Wind) wind += g.capacity_mw;
      if (g.type == GenType::Csp) csp.push_back(g.capacity_mw);
    }
    CHECK(wind == 3000.0);
    REQUIRE(csp.size() == 2);
    CHECK(csp[0] == 4500.0);
    CHECK(csp[1] == 4500.0);
    for (const auto& spec : cfg2.replacement->add) {
      if (spec.type != GenType::Csp) continue;
      const auto it = find(spec.name);
      REQUIRE(it != out.end());
      const auto& raw = data.availability.at(*spec.availability);
      for (std::size_t t = 0; t < 48; ++t) CHECK((*it->availability)[t] == raw[(t / 24) * 24 + (t % 24 + 12) % 24]);
    }
  }
  SUBCASE("absent unit is an error") {
    auto cfg = cfg2;
    cfg.replacement->remove.push_back("XPS_9");
    CHECK_THROWS(apply_renewable_replacement(base_fleet(cfg, data), cfg, data.availability));
  }
}

TEST_CASE("short runs: balance, conservation and report files") {
  std::vector<fs::path> dirs;
  for (int id = 1; id <= 5; ++id) {
    CAPTURE(id);
    const auto r = run_short(id);
    CHECK(r.scenario_id == id);
    CHECK(r.unserved_hours == 0);
    CHECK(r.unserved_energy_twh == 0.0);
    CHECK(r.loadability_gw > 0.0);
    CHECK(r.spilled_hours_pct >= 0.0);
    CHECK(r.spilled_hours_pct <= 100.0);
    CHECK(r.dispatch.hours.size() == 336);
    CHECK(r.price.size() == 4);

    // Served + unserved = nett demand + dumped.
    double nett = 0.0, served = 0.0;
    for (const auto& [reg, ts] : r.nett_demand) {
      for (std::size_t t = 0; t < ts.size(); ++t) nett += ts[t];
    }
    for (double e : r.dispatch.generator_energy_mwh) served += e;
    const double lhs = served + r.unserved_energy_twh * 1e6;
    const double rhs = nett + r.spilled_energy_twh * 1e6;
    CHECK(std::abs(lhs - rhs) <= 1e-6 * rhs);

    if (id <= 2) {
      for (const auto& [reg, ts] : r.nett_demand) {
        const auto& conv = r.conventional_demand.at(reg);
        CHECK(std::equal(ts.values().begin(), ts.values().end(), conv.values().begin(), conv.values().end()));
      }
    }

    const auto dir = fresh_dir("short_s" + std::to_string(id));
    emit_report(r, dir);
    dirs.push_back(dir);

    // Totals re-derive from the hourly CSV.
    std::ifstream hourly(dir / "dispatch_hourly.csv");
    std::string line;
    std::getline(hourly, line);
    const auto header = split(line);
    double dumped = 0.0, gt = 0.0;
    std::size_t rows = 0;
    while (std::getline(hourly, line)) {
      const auto cells = split(line);
      REQUIRE(cells.size() == header.size());
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c].rfind("dumped_", 0) == 0 && header[c] != "dumped_hour") dumped += std::stod(cells[c]);
        if (header[c].rfind("gen_", 0) != 0) continue;
        const auto name = header[c].substr(4);
        const auto g = std::find_if(r.fleet.begin(), r.fleet.end(), [&](const auto& u) { return u.name == name; });
        REQUIRE(g != r.fleet.end());
        if (g->type == GenType::GasTurbine) gt += std::stod(cells[c]);
      }
      ++rows;
    }
    CHECK(rows == 336);
    CHECK(rel_close(dumped / 1e6, r.spilled_energy_twh, 1e-9));
    CHECK(rel_close(gt / 1e6, r.gt_energy_twh, 1e-9));

    std::ifstream summary(dir / "summary.csv");
    std::getline(summary, line);
    CHECK(line == kSummaryHeader);
    summary.seekg(0);
    const auto rows_back = read_summary_csv(summary);
    REQUIRE(rows_back.size() == 1);
    CHECK(rows_back[0].scenario == id);
    CHECK(rows_back[0].spilled_energy_twh == r.spilled_energy_twh);
    CHECK(rows_back[0].loadability_gw == r.loadability_gw);

    const auto manifest = slurp(dir / "manifest.txt");
    CHECK(manifest.find("seed 1\n") != std::string::npos);
    CHECK(manifest.find("version 1.0.0\n") != std::string::npos);
  }

  const auto merged = merge_reports(dirs);
  REQUIRE(merged.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(merged[static_cast<std::size_t>(i)].scenario == i + 1);
  CHECK_THROWS(merge_reports({dirs[0], dirs[1], dirs[0]}));
}

TEST_CASE("identical runs give byte-identical reports") {
  const auto a = run_short(4);
  const auto b = run_short(4);
  const auto da = fresh_dir("det_a");
  const auto db = fresh_dir("det_b");
  emit_report(a, da);
  emit_report(b, db);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(da)) {
    INFO(e.path().filename().string());
    CHECK(slurp(e.path()) == slurp(db / e.path().filename()));
    ++files;
  }
  CHECK(files == 7);

  // Re-emitting the same report over existing files.
  const auto first = slurp(da / "dispatch_hourly.csv");
  emit_report(a, da);
  CHECK(slurp(da / "dispatch_hourly.csv") == first);
}

TEST_CASE("a different predictor seed is recorded") {
  RunOptions o;
  o.data_dir = short_fixture();
  o.seed = 7;
  const auto r = run_scenario(short_config(3), o);
  CHECK(r.seed == 7);
}

TEST_CASE("missing inputs fail with a stage tag") {
  RunOptions o;
  o.data_dir = kTmp / "does_not_exist";
  try {
    run_scenario(short_config(1), o);
    FAIL("expected an error");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::Inputs);
  } catch (const std::exception& e) {
    MESSAGE("untagged error: " << e.what());
    CHECK(false);
  }
}

TEST_CASE("bundled year: renewable share and spill reduction with uptake") {
  ScenarioData data;
  std::vector<ScenarioReport> reports;
  for (int id : {2, 4}) {
    auto cfg = scenario_from_config(kData / "scenarios" / ("scenario_" + std::to_string(id) + ".yaml"));
    cfg.loadability.hour_stride = 876;
    if (data.demand.empty()) data = load_scenario_data(cfg, kData);
    RunOptions o;
    o.data_dir = kData;
    reports.push_back(run_scenario(cfg, data, o));
  }
  MESSAGE("scenario 2 renewable share " << reports[0].renewable_share);
  CHECK(reports[0].renewable_share >= 0.18);
  CHECK(reports[0].renewable_share <= 0.22);
  CHECK(reports[0].unserved_hours == 0);
  CHECK(reports[1].unserved_hours == 0);
  CHECK(reports[1].spilled_energy_twh < reports[0].spilled_energy_twh);
}
