#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "gridstudy/scenario/pipeline.hpp"

namespace gridstudy::scenario {

/// One row of the scenario comparison table.
struct SummaryRow {
  int scenario = 0;
  double spilled_energy_twh = 0.0;
  double spilled_hours_pct = 0.0;
  double gt_energy_twh = 0.0;
  double loadability_gw = 0.0;
  double unserved_energy_twh = 0.0;
};

inline constexpr const char* kSummaryHeader =
    "scenario,spilled_energy_TWh,spilled_hours_pct,gt_energy_TWh,loadability_GW,"
    "unserved_energy_TWh";

SummaryRow summary_row(const ScenarioReport& report);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

/// Columns: hour, timestamp, then conventional_<R> and nett_<R> per demand region.
void write_demand_profiles_csv(const ScenarioReport& report, std::ostream& out);
/// Columns: hour, timestamp, price_<R> per demand region.
void write_price_csv(const ScenarioReport& report, std::ostream& out);
void write_manifest(const ScenarioReport& report, std::ostream& out);

/// Writes summary.csv, dispatch_summary.csv, dispatch_hourly.csv, loadability_hourly.csv,
/// demand_profiles.csv, prices.csv and manifest.txt into `out_dir`.
void emit_report(const ScenarioReport& report, const std::filesystem::path& out_dir);

/// Writes whatever parts of a failed run exist.
void emit_partial(const ScenarioReport& report, const std::filesystem::path& out_dir);

/// Reads summary.csv from every directory and returns the rows ordered by
/// scenario id. Throws if a scenario appears twice.
std::vector<SummaryRow> merge_reports(const std::vector<std::filesystem::path>& dirs);

}  // namespace gridstudy::scenario
