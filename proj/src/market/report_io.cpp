#include "gridstudy/market/report_io.hpp"

#include <ostream>

namespace gridstudy::market {

void write_dispatch_hourly_csv(const Fleet& fleet, const std::vector<Interconnector>& lines,
                               const DispatchResult& result, HourStamp start, std::ostream& out) {
  out << "hour,timestamp";
  for (const char* field : {"demand", "unserved", "dumped", "price"}) {
    for (Region r : kAllRegions) out << ',' << field << '_' << to_string(r);
  }
  for (const auto& g : fleet) out << ",gen_" << g.name;
  for (const auto& l : lines) out << ",flow_" << l.name();
  out << ",unserved_hour,dumped_hour\n";

  for (std::size_t t = 0; t < result.hours.size(); ++t) {
    const auto& h = result.hours[t];
    out << t << ',' << format_timestamp(start + std::chrono::hours(t));
    for (const auto* v : {&h.demand_mw, &h.unserved_mw, &h.dumped_mw, &h.price}) {
      for (double x : *v) out << ',' << format_exact(x);
    }
    for (double x : h.output_mw) out << ',' << format_exact(x);
    for (double x : h.flow_mw) out << ',' << format_exact(x);
    out << ',' << (h.unserved_hour ? 1 : 0) << ',' << (h.dumped_hour ? 1 : 0) << '\n';
  }
}

void write_dispatch_summary_csv(const DispatchResult& result, std::optional<double> loadability_gw,
                                std::ostream& out) {
  out << "spilled_energy_TWh,spilled_hours_pct,gt_energy_TWh,loadability_GW\n";
  out << format_exact(result.spilled_energy_twh) << ',' << format_exact(result.spilled_hours_pct)
      << ',' << format_exact(result.gt_energy_twh) << ',';
  if (loadability_gw) out << format_exact(*loadability_gw);
  out << '\n';
}

}  // namespace gridstudy::market
