#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridstudy/market/dispatch.hpp"
#include "gridstudy/market/fleet.hpp"
#include "gridstudy/powerflow/loadability.hpp"
#include "gridstudy/powerflow/network.hpp"
#include "gridstudy/timeseries/scenario_config.hpp"
#include "gridstudy/timeseries/time_series.hpp"

namespace gridstudy::scenario {

inline constexpr const char* kVersion = "1.0.0";

/// Pipeline stage names used in diagnostics and exit messages.
enum class Stage { Inputs, Fleet, PassZero, Training, Prediction, Demand, Dispatch, Loadability, Report };

const char* to_string(Stage s);

class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const std::string& what)
      : std::runtime_error(std::string(to_string(stage)) + ": " + what), stage_(stage) {}
  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

/// Everything read from the data directory for one configuration.
struct ScenarioData {
  std::map<Region, TimeSeries> demand;           ///< conventional demand, MW
  std::map<Region, TimeSeries> pv;               ///< rooftop PV, per unit of capacity
  std::map<Region, TimeSeries> historical_price; ///< $/MWh
  std::map<std::string, TimeSeries> availability;
  powerflow::BusNetwork network;
};

ScenarioData load_scenario_data(const ScenarioConfig& cfg, const std::filesystem::path& data_dir);

/// Scenario 1 returns the fleet unchanged. Otherwise the listed units are
/// removed and the replacement units added, CSP traces shifted within each day.
market::Fleet apply_renewable_replacement(const market::Fleet& fleet, const ScenarioConfig& cfg,
                                          const std::map<std::string, TimeSeries>& availability);

struct RunOptions {
  std::filesystem::path data_dir;
  std::optional<std::uint64_t> seed;  ///< overrides the configured predictor seed
  std::uint64_t config_hash = 0;
  /// Where intermediate outputs go if a stage fails.
  std::optional<std::filesystem::path> partial_dir;
};

struct ScenarioReport {
  int scenario_id = 0;
  std::string name;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  HourStamp start{};

  double spilled_energy_twh = 0.0;
  double spilled_hours_pct = 0.0;
  double gt_energy_twh = 0.0;
  double unserved_energy_twh = 0.0;
  std::size_t unserved_hours = 0;
  double loadability_gw = 0.0;
  double renewable_share = 0.0;  ///< renewable energy net of spill over served energy

  market::Fleet fleet;
  std::vector<market::Interconnector> lines;
  market::DispatchResult dispatch;
  powerflow::LoadabilityResult loadability;
  std::map<Region, TimeSeries> conventional_demand;
  std::map<Region, TimeSeries> nett_demand;
  std::map<Region, TimeSeries> price;  ///< predicted prices given to customers
};

ScenarioReport run_scenario(const ScenarioConfig& cfg, const RunOptions& options);
/// Same, reusing already loaded inputs.
ScenarioReport run_scenario(const ScenarioConfig& cfg, const ScenarioData& data,
                            const RunOptions& options);

/// Share of served energy supplied by renewables after spill.
double renewable_share(const market::Fleet& fleet, const market::DispatchResult& dispatch);

/// Grid energy drawn (MWh, positive nett demand only) in each region's
/// top-decile predicted-price hours, summed over regions.
double top_decile_price_imports(const ScenarioReport& report);

/// Days (index from the start) on which some region's nett-demand maximum
/// falls on an hour carrying that day's minimum predicted price.
std::vector<std::size_t> secondary_peak_days(const ScenarioReport& report);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace gridstudy::scenario
