#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridstudy/timeseries/regions.hpp"
#include "gridstudy/timeseries/time_series.hpp"

namespace gridstudy {

inline constexpr int kConfigSchemaVersion = 1;

/// Aggregated PV-plus-storage resources of one region (or of the whole
/// system). Energies in MWh, powers in MW.
struct StorageSpec {
  double soc_min_mwh = 0.0;
  double soc_max_mwh = 0.0;
  double pv_capacity_mw = 0.0;
  /// Charge rate in MW (>= 0). Defaults to half the SOC window per hour.
  std::optional<double> charge_rate_mw;
  /// Discharge rate in MW (<= 0). Defaults to minus half the SOC window.
  std::optional<double> discharge_rate_mw;

  double default_rate_mw() const { return 0.5 * (soc_max_mwh - soc_min_mwh); }
};

/// Aggregated capacities per region and uptake level. Energies in MWh, PV in MW.
/// `Uptake::None` has no entry.
std::optional<StorageSpec> storage_catalog(Region region, Uptake uptake);
/// System-wide (NEM) totals as tabulated; these are not the sum of the regions.
std::optional<StorageSpec> system_storage_catalog(Uptake uptake);

struct GeneratorSpec {
  std::string name;
  GenType type = GenType::BlackCoal;
  std::string zone;
  Region region = Region::NSW;
  double capacity_mw = 0.0;
  /// Defaults: 40 % of capacity for coal, 0 otherwise.
  std::optional<double> min_stable_mw;
  double srmc = 0.0;  ///< $/MWh
  /// Key into DataFiles::availability; required for renewables.
  std::optional<std::string> availability;
};

struct InterconnectorSpec {
  Region from = Region::NSW;
  Region to = Region::QLD;
  double forward_mw = 0.0;  ///< max flow from -> to
  double reverse_mw = 0.0;  ///< max flow to -> from, stored negative
};

struct RenewableReplacement {
  std::vector<std::string> remove;
  std::vector<GeneratorSpec> add;
  int csp_delay_hours = 12;
};

struct DataFiles {
  std::map<Region, std::string> demand;            ///< regional demand, MW
  std::map<Region, std::string> pv;                ///< rooftop PV, per unit of capacity
  std::map<Region, std::string> historical_price;  ///< $/MWh
  std::map<std::string, std::string> availability; ///< renewable traces, per unit
  std::string network_buses;
  std::string network_branches;
};

enum class LoadabilityScan { Linear, CoarseToFine };

struct LoadabilityOptions {
  Region region = Region::QLD;
  double step = 0.005;  ///< relative load increment per step
  LoadabilityScan scan = LoadabilityScan::CoarseToFine;
  int coarse_factor = 8;
  double max_lambda = 10.0;
  /// Evaluate every n-th hour (1 = every hour).
  int hour_stride = 1;
};

enum class PredictorKind { NearestNeighbor, Ridge };

struct PredictorOptions {
  PredictorKind kind = PredictorKind::NearestNeighbor;
  std::uint64_t seed = 1;
  /// Cap on retained nearest-neighbour exemplars; 0 keeps all.
  std::size_t max_exemplars = 0;
};

struct ScenarioConfig {
  int schema_version = kConfigSchemaVersion;
  int scenario_id = 1;
  std::string name;
  Uptake uptake = Uptake::None;
  HourStamp start{};
  std::size_t hours = 8760;
  DataFiles data;
  std::map<Region, StorageSpec> storage;
  std::optional<StorageSpec> system_storage;
  double battery_efficiency = 0.9;
  std::vector<GeneratorSpec> generators;
  std::vector<InterconnectorSpec> interconnectors;
  std::optional<RenewableReplacement> replacement;
  /// Per region: zone name -> weight. Regions without an entry split equally.
  std::map<Region, std::map<std::string, double>> zone_weights;
  LoadabilityOptions loadability;
  PredictorOptions predictor;
  /// Demand-side resources are scheduled by the cost-minimizing model
  /// (scenarios 3-5); otherwise the conventional load is used.
  bool demand_response() const { return uptake != Uptake::None; }
};

/// One entry per violated field: "<field>: <reason>".
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

ScenarioConfig scenario_from_config(const std::filesystem::path& path);
ScenarioConfig scenario_from_string(const std::string& yaml_text);

/// Throws ConfigError listing every violated invariant.
void validate(const ScenarioConfig& config);

}  // namespace gridstudy
