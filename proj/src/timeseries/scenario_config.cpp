#include "gridstudy/timeseries/scenario_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace gridstudy {

namespace {

struct CatalogRow {
  Uptake uptake;
  double soc_min_gwh, soc_max_gwh, pv_gw;
};

// Aggregated storage window and rooftop PV per region and uptake level.
const std::map<Region, std::vector<CatalogRow>>& regional_catalog() {
  static const std::map<Region, std::vector<CatalogRow>> table = {
      {Region::QLD,
       {{Uptake::Low, 0.4, 4.3, 1.3}, {Uptake::Medium, 0.6, 6.4, 1.9}, {Uptake::High, 0.9, 8.5, 2.6}}},
      {Region::NSW,
       {{Uptake::Low, 0.7, 6.7, 2.0}, {Uptake::Medium, 1.0, 10.1, 3.0}, {Uptake::High, 1.4, 13.5, 4.1}}},
      {Region::VIC,
       {{Uptake::Low, 0.5, 5.0, 1.5}, {Uptake::Medium, 0.8, 7.5, 2.3}, {Uptake::High, 1.0, 10.0, 3.0}}},
      {Region::SA,
       {{Uptake::Low, 0.1, 1.2, 0.3}, {Uptake::Medium, 0.2, 1.7, 0.5}, {Uptake::High, 0.2, 2.3, 0.7}}},
  };
  return table;
}

const std::vector<CatalogRow>& system_catalog() {
  static const std::vector<CatalogRow> rows = {
      {Uptake::Low, 1.7, 17.0, 5.0}, {Uptake::Medium, 2.5, 25.0, 7.5}, {Uptake::High, 3.4, 34.0, 10.5}};
  return rows;
}

std::optional<StorageSpec> lookup(const std::vector<CatalogRow>& rows, Uptake uptake) {
  for (const auto& row : rows) {
    if (row.uptake == uptake) {
      StorageSpec s;
      s.soc_min_mwh = row.soc_min_gwh * 1000.0;
      s.soc_max_mwh = row.soc_max_gwh * 1000.0;
      s.pv_capacity_mw = row.pv_gw * 1000.0;
      return s;
    }
  }
  return std::nullopt;
}

// Collects problems instead of failing on the first one.
class Reader {
 public:
  std::vector<std::string> problems;

  void check_keys(const YAML::Node& node, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    if (!node.IsMap()) {
      problems.push_back(where + ": expected a mapping");
      return;
    }
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) problems.push_back(fmt::format("{}: unknown key '{}'", where, key));
    }
  }

  template <typename T>
  std::optional<T> get(const YAML::Node& node, const char* key, const std::string& where,
                       bool required) {
    const YAML::Node child = node.IsMap() ? node[key] : YAML::Node();
    if (!child.IsDefined() || child.IsNull()) {
      if (required) problems.push_back(fmt::format("{}.{}: required field missing", where, key));
      return std::nullopt;
    }
    try {
      return child.as<T>();
    } catch (const YAML::Exception&) {
      problems.push_back(fmt::format("{}.{}: wrong value type", where, key));
      return std::nullopt;
    }
  }

  std::optional<Region> region(const std::string& text, const std::string& where) {
    auto r = parse_region(text);
    if (!r) problems.push_back(fmt::format("{}: unknown region '{}'", where, text));
    return r;
  }

  std::map<Region, std::string> region_files(const YAML::Node& node, const std::string& where) {
    std::map<Region, std::string> out;
    if (!node.IsDefined() || node.IsNull()) return out;
    if (!node.IsMap()) {
      problems.push_back(where + ": expected a mapping of region to file");
      return out;
    }
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (auto r = region(key, where)) {
        try {
          out[*r] = kv.second.as<std::string>();
        } catch (const YAML::Exception&) {
          problems.push_back(fmt::format("{}.{}: wrong value type", where, key));
        }
      }
    }
    return out;
  }

  StorageSpec storage(const YAML::Node& node, const std::string& where) {
    check_keys(node, where,
               {"soc_min_mwh", "soc_max_mwh", "pv_capacity_mw", "charge_rate_mw", "discharge_rate_mw"});
    StorageSpec s;
    s.soc_min_mwh = get<double>(node, "soc_min_mwh", where, true).value_or(0.0);
    s.soc_max_mwh = get<double>(node, "soc_max_mwh", where, true).value_or(0.0);
    s.pv_capacity_mw = get<double>(node, "pv_capacity_mw", where, true).value_or(0.0);
    s.charge_rate_mw = get<double>(node, "charge_rate_mw", where, false);
    s.discharge_rate_mw = get<double>(node, "discharge_rate_mw", where, false);
    return s;
  }

  GeneratorSpec generator(const YAML::Node& node, const std::string& where) {
    check_keys(node, where,
               {"name", "type", "zone", "region", "capacity_mw", "min_stable_mw", "srmc",
                "availability"});
    GeneratorSpec g;
    g.name = get<std::string>(node, "name", where, true).value_or("");
    if (auto t = get<std::string>(node, "type", where, true)) {
      if (auto parsed = parse_gen_type(*t)) {
        g.type = *parsed;
      } else {
        problems.push_back(fmt::format("{}.type: unknown generator type '{}'", where, *t));
      }
    }
    g.zone = get<std::string>(node, "zone", where, false).value_or("");
    if (auto r = get<std::string>(node, "region", where, true)) {
      if (auto parsed = region(*r, where + ".region")) g.region = *parsed;
    }
    g.capacity_mw = get<double>(node, "capacity_mw", where, true).value_or(0.0);
    g.min_stable_mw = get<double>(node, "min_stable_mw", where, false);
    g.srmc = get<double>(node, "srmc", where, !is_renewable(g.type)).value_or(0.0);
    g.availability = get<std::string>(node, "availability", where, false);
    return g;
  }

  std::vector<GeneratorSpec> generators(const YAML::Node& node, const std::string& where) {
    std::vector<GeneratorSpec> out;
    if (!node.IsSequence()) {
      problems.push_back(where + ": expected a list of generators");
      return out;
    }
    for (std::size_t i = 0; i < node.size(); ++i) {
      out.push_back(generator(node[i], fmt::format("{}[{}]", where, i)));
    }
    return out;
  }
};

ScenarioConfig parse(const YAML::Node& root) {
  Reader rd;
  ScenarioConfig cfg;
  rd.check_keys(root, "config",
                {"schema_version", "scenario", "name", "uptake", "calendar", "data", "storage",
                 "battery_efficiency", "generators", "interconnectors", "replacement", "zone_weights",
                 "loadability", "predictor"});
  if (!root.IsMap()) throw ConfigError(rd.problems);

  if (auto v = rd.get<int>(root, "schema_version", "config", true)) {
    if (*v != kConfigSchemaVersion) {
      rd.problems.push_back(fmt::format("config.schema_version: unsupported version {} (expected {})",
                                        *v, kConfigSchemaVersion));
    }
    cfg.schema_version = *v;
  }
  cfg.scenario_id = rd.get<int>(root, "scenario", "config", true).value_or(0);
  cfg.name = rd.get<std::string>(root, "name", "config", false).value_or("");
  bool have_uptake = false;
  if (auto u = rd.get<std::string>(root, "uptake", "config", true)) {
    if (auto parsed = parse_uptake(*u)) {
      cfg.uptake = *parsed;
      have_uptake = true;
    } else {
      rd.problems.push_back(fmt::format("config.uptake: unknown uptake level '{}'", *u));
    }
  }

  const YAML::Node cal = root["calendar"];
  if (cal.IsDefined()) {
    rd.check_keys(cal, "calendar", {"start", "hours"});
    if (auto s = rd.get<std::string>(cal, "start", "calendar", false)) {
      try {
        cfg.start = parse_timestamp(*s);
      } catch (const std::invalid_argument& e) {
        rd.problems.push_back(std::string("calendar.start: ") + e.what());
      }
    }
    if (auto h = rd.get<long long>(cal, "hours", "calendar", false)) {
      if (*h <= 0) {
        rd.problems.push_back("calendar.hours: must be positive");
      } else {
        cfg.hours = static_cast<std::size_t>(*h);
      }
    }
  } else {
    cfg.start = parse_timestamp("2021-01-01T00:00");
  }

  const YAML::Node data = root["data"];
  if (!data.IsDefined()) {
    rd.problems.push_back("config.data: required field missing");
  } else {
    rd.check_keys(data, "data", {"demand", "pv", "historical_price", "availability", "network"});
    cfg.data.demand = rd.region_files(data["demand"], "data.demand");
    cfg.data.pv = rd.region_files(data["pv"], "data.pv");
    cfg.data.historical_price = rd.region_files(data["historical_price"], "data.historical_price");
    const YAML::Node av = data["availability"];
    if (av.IsDefined() && av.IsMap()) {
      for (const auto& kv : av) {
        cfg.data.availability[kv.first.as<std::string>()] = kv.second.as<std::string>();
      }
    }
    const YAML::Node net = data["network"];
    if (net.IsDefined()) {
      rd.check_keys(net, "data.network", {"buses", "branches"});
      cfg.data.network_buses = rd.get<std::string>(net, "buses", "data.network", true).value_or("");
      cfg.data.network_branches =
          rd.get<std::string>(net, "branches", "data.network", true).value_or("");
    } else {
      rd.problems.push_back("data.network: required field missing");
    }
  }

  const YAML::Node storage = root["storage"];
  if (storage.IsDefined() && !storage.IsNull()) {
    if (!storage.IsMap()) {
      rd.problems.push_back("storage: expected a mapping");
    } else {
      for (const auto& kv : storage) {
        const auto key = kv.first.as<std::string>();
        if (key == "NEM") {
          cfg.system_storage = rd.storage(kv.second, "storage.NEM");
        } else if (auto r = rd.region(key, "storage")) {
          cfg.storage[*r] = rd.storage(kv.second, "storage." + key);
        }
      }
    }
  }
  if (have_uptake && cfg.uptake != Uptake::None) {
    for (Region r : kDemandRegions) {
      if (!cfg.storage.contains(r)) cfg.storage[r] = *storage_catalog(r, cfg.uptake);
    }
    if (!cfg.system_storage) cfg.system_storage = system_storage_catalog(cfg.uptake);
  }

  cfg.battery_efficiency =
      rd.get<double>(root, "battery_efficiency", "config", false).value_or(cfg.battery_efficiency);

  if (root["generators"].IsDefined()) {
    cfg.generators = rd.generators(root["generators"], "generators");
  } else {
    rd.problems.push_back("config.generators: required field missing");
  }

  const YAML::Node lines = root["interconnectors"];
  if (lines.IsDefined() && lines.IsSequence()) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string where = fmt::format("interconnectors[{}]", i);
      rd.check_keys(lines[i], where, {"from", "to", "forward_mw", "reverse_mw"});
      InterconnectorSpec ic;
      if (auto f = rd.get<std::string>(lines[i], "from", where, true)) {
        if (auto r = rd.region(*f, where + ".from")) ic.from = *r;
      }
      if (auto t = rd.get<std::string>(lines[i], "to", where, true)) {
        if (auto r = rd.region(*t, where + ".to")) ic.to = *r;
      }
      ic.forward_mw = rd.get<double>(lines[i], "forward_mw", where, true).value_or(0.0);
      ic.reverse_mw = rd.get<double>(lines[i], "reverse_mw", where, true).value_or(0.0);
      cfg.interconnectors.push_back(ic);
    }
  } else if (lines.IsDefined()) {
    rd.problems.push_back("interconnectors: expected a list");
  }

  const YAML::Node repl = root["replacement"];
  if (repl.IsDefined() && !repl.IsNull()) {
    rd.check_keys(repl, "replacement", {"remove", "add", "csp_delay_hours"});
    RenewableReplacement rr;
    if (repl["remove"].IsDefined()) {
      try {
        rr.remove = repl["remove"].as<std::vector<std::string>>();
      } catch (const YAML::Exception&) {
        rd.problems.push_back("replacement.remove: expected a list of generator names");
      }
    }
    if (repl["add"].IsDefined()) rr.add = rd.generators(repl["add"], "replacement.add");
    rr.csp_delay_hours = rd.get<int>(repl, "csp_delay_hours", "replacement", false).value_or(12);
    cfg.replacement = std::move(rr);
  }

  const YAML::Node zw = root["zone_weights"];
  if (zw.IsDefined() && zw.IsMap()) {
    for (const auto& kv : zw) {
      const auto key = kv.first.as<std::string>();
      if (auto r = rd.region(key, "zone_weights")) {
        try {
          cfg.zone_weights[*r] = kv.second.as<std::map<std::string, double>>();
        } catch (const YAML::Exception&) {
          rd.problems.push_back("zone_weights." + key + ": expected zone -> weight mapping");
        }
      }
    }
  }

  const YAML::Node la = root["loadability"];
  if (la.IsDefined()) {
    rd.check_keys(la, "loadability",
                  {"region", "step", "scan", "coarse_factor", "max_lambda", "hour_stride"});
    if (auto r = rd.get<std::string>(la, "region", "loadability", false)) {
      if (auto parsed = rd.region(*r, "loadability.region")) cfg.loadability.region = *parsed;
    }
    cfg.loadability.step = rd.get<double>(la, "step", "loadability", false).value_or(0.005);
    if (auto s = rd.get<std::string>(la, "scan", "loadability", false)) {
      if (*s == "linear") {
        cfg.loadability.scan = LoadabilityScan::Linear;
      } else if (*s == "coarse_to_fine") {
        cfg.loadability.scan = LoadabilityScan::CoarseToFine;
      } else {
        rd.problems.push_back("loadability.scan: expected 'linear' or 'coarse_to_fine'");
      }
    }
    cfg.loadability.coarse_factor =
        rd.get<int>(la, "coarse_factor", "loadability", false).value_or(8);
    cfg.loadability.max_lambda = rd.get<double>(la, "max_lambda", "loadability", false).value_or(10.0);
    cfg.loadability.hour_stride = rd.get<int>(la, "hour_stride", "loadability", false).value_or(1);
  }

  const YAML::Node pr = root["predictor"];
  if (pr.IsDefined()) {
    rd.check_keys(pr, "predictor", {"kind", "seed", "max_exemplars"});
    if (auto k = rd.get<std::string>(pr, "kind", "predictor", false)) {
      if (*k == "nearest_neighbor") {
        cfg.predictor.kind = PredictorKind::NearestNeighbor;
      } else if (*k == "ridge") {
        cfg.predictor.kind = PredictorKind::Ridge;
      } else {
        rd.problems.push_back("predictor.kind: expected 'nearest_neighbor' or 'ridge'");
      }
    }
    if (auto s = rd.get<long long>(pr, "seed", "predictor", false)) {
      if (*s < 0) {
        rd.problems.push_back("predictor.seed: must be nonnegative");
      } else {
        cfg.predictor.seed = static_cast<std::uint64_t>(*s);
      }
    }
    if (auto m = rd.get<long long>(pr, "max_exemplars", "predictor", false)) {
      if (*m < 0) {
        rd.problems.push_back("predictor.max_exemplars: must be nonnegative");
      } else {
        cfg.predictor.max_exemplars = static_cast<std::size_t>(*m);
      }
    }
  }

  if (!rd.problems.empty()) throw ConfigError(rd.problems);
  validate(cfg);
  return cfg;
}

void check_storage(const StorageSpec& s, const std::string& where, std::vector<std::string>& out) {
  if (!(s.soc_min_mwh >= 0.0)) out.push_back(where + ".soc_min_mwh: must be >= 0");
  if (!(s.soc_min_mwh < s.soc_max_mwh)) {
    out.push_back(where + ": battery min must be strictly less than max");
  }
  if (!(s.pv_capacity_mw >= 0.0)) out.push_back(where + ".pv_capacity_mw: must be >= 0");
  if (s.charge_rate_mw && !(*s.charge_rate_mw >= 0.0)) {
    out.push_back(where + ".charge_rate_mw: must be >= 0");
  }
  if (s.discharge_rate_mw && !(*s.discharge_rate_mw <= 0.0)) {
    out.push_back(where + ".discharge_rate_mw: must be <= 0");
  }
}

void check_generator(const GeneratorSpec& g, const std::string& where, const DataFiles& data,
                     std::vector<std::string>& out) {
  if (g.name.empty()) out.push_back(where + ".name: must not be empty");
  if (!(g.capacity_mw >= 0.0) || !std::isfinite(g.capacity_mw)) {
    out.push_back(where + ".capacity_mw: must be finite and >= 0");
  }
  if (g.min_stable_mw && !(*g.min_stable_mw >= 0.0 && *g.min_stable_mw <= g.capacity_mw)) {
    out.push_back(where + ".min_stable_mw: must lie in [0, capacity]");
  }
  if (!(g.srmc >= 0.0)) out.push_back(where + ".srmc: must be >= 0");
  if (is_renewable(g.type)) {
    if (g.srmc != 0.0) out.push_back(where + ".srmc: renewable units bid at zero");
    if (!g.availability) {
      out.push_back(where + ".availability: required for renewable units");
    } else if (!data.availability.contains(*g.availability)) {
      out.push_back(where + ".availability: no data file named '" + *g.availability + "'");
    }
  }
}

}  // namespace

std::optional<StorageSpec> storage_catalog(Region region, Uptake uptake) {
  const auto& table = regional_catalog();
  auto it = table.find(region);
  if (it == table.end()) return std::nullopt;
  return lookup(it->second, uptake);
}

std::optional<StorageSpec> system_storage_catalog(Uptake uptake) {
  return lookup(system_catalog(), uptake);
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid scenario config:";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

void validate(const ScenarioConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.schema_version != kConfigSchemaVersion) out.push_back("schema_version: unsupported");
  if (cfg.scenario_id < 1 || cfg.scenario_id > 5) out.push_back("scenario: must be in 1..5");

  static constexpr std::array<Uptake, 5> kScenarioUptake = {Uptake::None, Uptake::None, Uptake::Low,
                                                            Uptake::Medium, Uptake::High};
  if (cfg.scenario_id >= 1 && cfg.scenario_id <= 5 &&
      kScenarioUptake[static_cast<std::size_t>(cfg.scenario_id - 1)] != cfg.uptake) {
    out.push_back(fmt::format("uptake: scenario {} requires uptake '{}'", cfg.scenario_id,
                              to_string(kScenarioUptake[static_cast<std::size_t>(cfg.scenario_id - 1)])));
  }
  if (cfg.hours == 0 || cfg.hours % 24 != 0) out.push_back("calendar.hours: must be whole days");

  for (Region r : kDemandRegions) {
    if (!cfg.data.demand.contains(r)) {
      out.push_back(fmt::format("data.demand.{}: required", to_string(r)));
    }
    if (!cfg.data.historical_price.contains(r)) {
      out.push_back(fmt::format("data.historical_price.{}: required", to_string(r)));
    }
    if (cfg.demand_response() && !cfg.data.pv.contains(r)) {
      out.push_back(fmt::format("data.pv.{}: required when uptake is not 'none'", to_string(r)));
    }
  }
  if (cfg.data.network_buses.empty() || cfg.data.network_branches.empty()) {
    out.push_back("data.network: buses and branches files required");
  }

  if (cfg.demand_response()) {
    for (Region r : kDemandRegions) {
      auto it = cfg.storage.find(r);
      if (it == cfg.storage.end()) {
        out.push_back(fmt::format("storage.{}: required", to_string(r)));
      } else {
        check_storage(it->second, fmt::format("storage.{}", to_string(r)), out);
      }
    }
  }
  for (const auto& [r, s] : cfg.storage) {
    if (!cfg.demand_response()) check_storage(s, fmt::format("storage.{}", to_string(r)), out);
  }
  if (cfg.system_storage) check_storage(*cfg.system_storage, "storage.NEM", out);

  if (!(cfg.battery_efficiency > 0.0 && cfg.battery_efficiency <= 1.0)) {
    out.push_back("battery_efficiency: must lie in (0, 1]");
  }

  if (cfg.generators.empty()) out.push_back("generators: fleet is empty");
  std::set<std::string> names;
  for (std::size_t i = 0; i < cfg.generators.size(); ++i) {
    const auto& g = cfg.generators[i];
    check_generator(g, fmt::format("generators[{}]", i), cfg.data, out);
    if (!names.insert(g.name).second) {
      out.push_back(fmt::format("generators[{}].name: duplicate '{}'", i, g.name));
    }
  }

  for (std::size_t i = 0; i < cfg.interconnectors.size(); ++i) {
    const auto& ic = cfg.interconnectors[i];
    const std::string where = fmt::format("interconnectors[{}]", i);
    if (ic.from == ic.to) out.push_back(where + ": from and to must differ");
    if (!(ic.reverse_mw <= 0.0 && 0.0 <= ic.forward_mw)) {
      out.push_back(where + ": limits must satisfy reverse <= 0 <= forward");
    }
  }

  if (cfg.scenario_id == 1 && cfg.replacement) {
    out.push_back("replacement: scenario 1 (business as usual) has no renewable replacement");
  }
  if (cfg.scenario_id >= 2 && cfg.scenario_id <= 5 && !cfg.replacement) {
    out.push_back("replacement: required for renewable scenarios 2-5");
  }
  if (cfg.replacement) {
    const auto& rr = *cfg.replacement;
    for (const auto& name : rr.remove) {
      if (!names.contains(name)) out.push_back("replacement.remove: unknown generator '" + name + "'");
    }
    for (std::size_t i = 0; i < rr.add.size(); ++i) {
      check_generator(rr.add[i], fmt::format("replacement.add[{}]", i), cfg.data, out);
      if (names.contains(rr.add[i].name) &&
          std::find(rr.remove.begin(), rr.remove.end(), rr.add[i].name) == rr.remove.end()) {
        out.push_back(fmt::format("replacement.add[{}].name: duplicate '{}'", i, rr.add[i].name));
      }
    }
    if (rr.csp_delay_hours < 0) out.push_back("replacement.csp_delay_hours: must be >= 0");
  }

  for (const auto& [r, weights] : cfg.zone_weights) {
    try {
      ZoneWeights w(weights);
    } catch (const std::invalid_argument& e) {
      out.push_back(fmt::format("zone_weights.{}: {}", to_string(r), e.what()));
    }
  }

  const auto& la = cfg.loadability;
  if (!(la.step > 0.0)) out.push_back("loadability.step: must be > 0");
  if (la.coarse_factor < 1) out.push_back("loadability.coarse_factor: must be >= 1");
  if (!(la.max_lambda > 1.0)) out.push_back("loadability.max_lambda: must be > 1");
  if (la.hour_stride < 1) out.push_back("loadability.hour_stride: must be >= 1");

  if (!out.empty()) throw ConfigError(std::move(out));
}

ScenarioConfig scenario_from_string(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("config: YAML syntax error: ") + e.what()});
  }
  try {
    return parse(root);
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("config: malformed value: ") + e.what()});
  }
}

ScenarioConfig scenario_from_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot open " + path.string()});
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_string(ss.str());
}

}  // namespace gridstudy
