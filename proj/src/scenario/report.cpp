#include "gridstudy/scenario/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "gridstudy/market/report_io.hpp"

namespace gridstudy::scenario {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  auto out = open_out(path);
  fn(out);
  finish(out, path);
}

double parse_field(const std::string& s, std::size_t row) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(fmt::format("summary row {}: bad number '{}'", row, s), row);
  }
  return v;
}

}  // namespace

SummaryRow summary_row(const ScenarioReport& r) {
  return {r.scenario_id, r.spilled_energy_twh, r.spilled_hours_pct, r.gt_energy_twh,
          r.loadability_gw, r.unserved_energy_twh};
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.scenario << ',' << format_exact(r.spilled_energy_twh) << ','
        << format_exact(r.spilled_hours_pct) << ',' << format_exact(r.gt_energy_twh) << ','
        << format_exact(r.loadability_gw) << ',' << format_exact(r.unserved_energy_twh) << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) {
    throw DataError("summary: unexpected header", 1);
  }
  std::vector<SummaryRow> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw DataError(fmt::format("summary row {}: expected 6 fields", row), row);
    SummaryRow s;
    s.scenario = static_cast<int>(parse_field(f[0], row));
    s.spilled_energy_twh = parse_field(f[1], row);
    s.spilled_hours_pct = parse_field(f[2], row);
    s.gt_energy_twh = parse_field(f[3], row);
    s.loadability_gw = parse_field(f[4], row);
    s.unserved_energy_twh = parse_field(f[5], row);
    rows.push_back(s);
  }
  return rows;
}

void write_demand_profiles_csv(const ScenarioReport& report, std::ostream& out) {
  out << "hour,timestamp";
  for (const auto& [r, ts] : report.conventional_demand) out << ",conventional_" << to_string(r);
  for (const auto& [r, ts] : report.nett_demand) out << ",nett_" << to_string(r);
  out << '\n';
  std::size_t n = 0;
  for (const auto& [r, ts] : report.conventional_demand) n = std::max(n, ts.size());
  for (std::size_t t = 0; t < n; ++t) {
    out << t << ',' << format_timestamp(report.start + std::chrono::hours(t));
    for (const auto& [r, ts] : report.conventional_demand) out << ',' << format_exact(ts[t]);
    for (const auto& [r, ts] : report.nett_demand) out << ',' << format_exact(ts[t]);
    out << '\n';
  }
}

void write_price_csv(const ScenarioReport& report, std::ostream& out) {
  out << "hour,timestamp";
  for (const auto& [r, ts] : report.price) out << ",price_" << to_string(r);
  out << '\n';
  const std::size_t n = report.price.empty() ? 0 : report.price.begin()->second.size();
  for (std::size_t t = 0; t < n; ++t) {
    out << t << ',' << format_timestamp(report.start + std::chrono::hours(t));
    for (const auto& [r, ts] : report.price) out << ',' << format_exact(ts[t]);
    out << '\n';
  }
}

void write_manifest(const ScenarioReport& report, std::ostream& out) {
  out << "gridstudy run manifest\n";
  out << "version " << kVersion << '\n';
  out << "scenario " << report.scenario_id << '\n';
  out << "name " << report.name << '\n';
  out << fmt::format("config_hash {:016x}\n", report.config_hash);
  out << "seed " << report.seed << '\n';
  out << "start " << format_timestamp(report.start) << '\n';
  out << "hours " << report.dispatch.hours.size() << '\n';
  out << "loadability_hours " << report.loadability.hours.size() << '\n';
  out << "loadability_step " << format_exact(report.loadability.step) << '\n';
  out << "renewable_share " << format_exact(report.renewable_share) << '\n';
  out << "unserved_hours " << report.unserved_hours << '\n';
  out << "fleet";
  for (const auto& g : report.fleet) out << ' ' << g.name;
  out << '\n';
}

void emit_report(const ScenarioReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv({summary_row(report)}, o); });
  write_file(dir / "dispatch_hourly.csv", [&](std::ostream& o) {
    market::write_dispatch_hourly_csv(report.fleet, report.lines, report.dispatch, report.start, o);
  });
  write_file(dir / "dispatch_summary.csv", [&](std::ostream& o) {
    market::write_dispatch_summary_csv(report.dispatch, report.loadability_gw, o);
  });
  write_file(dir / "loadability_hourly.csv",
             [&](std::ostream& o) { powerflow::write_loadability_csv(report.loadability, o); });
  write_file(dir / "demand_profiles.csv", [&](std::ostream& o) { write_demand_profiles_csv(report, o); });
  write_file(dir / "prices.csv", [&](std::ostream& o) { write_price_csv(report, o); });
  write_file(dir / "manifest.txt", [&](std::ostream& o) { write_manifest(report, o); });
}

void emit_partial(const ScenarioReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (!report.price.empty()) {
    write_file(dir / "prices.csv", [&](std::ostream& o) { write_price_csv(report, o); });
  }
  if (!report.conventional_demand.empty()) {
    write_file(dir / "demand_profiles.csv",
               [&](std::ostream& o) { write_demand_profiles_csv(report, o); });
  }
  if (!report.dispatch.hours.empty()) {
    write_file(dir / "dispatch_hourly.csv", [&](std::ostream& o) {
      market::write_dispatch_hourly_csv(report.fleet, report.lines, report.dispatch, report.start, o);
    });
  }
  if (!report.loadability.hours.empty()) {
    write_file(dir / "loadability_hourly.csv",
               [&](std::ostream& o) { powerflow::write_loadability_csv(report.loadability, o); });
  }
}

std::vector<SummaryRow> merge_reports(const std::vector<std::filesystem::path>& dirs) {
  std::vector<SummaryRow> rows;
  std::set<int> seen;
  for (const auto& d : dirs) {
    const auto path = d / "summary.csv";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<SummaryRow> part;
    try {
      part = read_summary_csv(in);
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what(), e.row());
    }
    for (const auto& r : part) {
      if (!seen.insert(r.scenario).second) {
        throw std::runtime_error(fmt::format("scenario {} appears twice ({})", r.scenario, path.string()));
      }
      rows.push_back(r);
    }
  }
  std::sort(rows.begin(), rows.end(),
            [](const SummaryRow& a, const SummaryRow& b) { return a.scenario < b.scenario; });
  return rows;
}

}  // namespace gridstudy::scenario
