#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridstudy/timeseries/regions.hpp"

namespace gridstudy::powerflow {

inline constexpr double kDefaultBaseMva = 100.0;

enum class BusType { Slack, PV, PQ };

struct Bus {
  int id = 0;
  std::string name;
  BusType type = BusType::PQ;
  Region region = Region::NSW;
  std::string zone;
  double p_load_mw = 0.0;
  double q_load_mvar = 0.0;
  double p_gen_mw = 0.0;  ///< scheduled output; ignored at the slack
  double v_set_pu = 1.0;  ///< held at slack and PV buses
  std::vector<std::string> generators;  ///< market units connected here
};

struct Branch {
  int from = 0;
  int to = 0;
  double r_pu = 0.0;
  double x_pu = 0.0;
  double b_pu = 0.0;  ///< total line charging, split half to each end
};

struct BusNetwork {
  double base_mva = kDefaultBaseMva;
  std::vector<Bus> buses;
  std::vector<Branch> branches;

  /// Position of bus `id` in `buses`; throws std::out_of_range.
  std::size_t position(int id) const;
  std::size_t slack_position() const;
  /// Throws std::invalid_argument unless there is exactly one slack bus, ids
  /// are unique, branches reference known buses with nonzero reactance and
  /// the graph is connected.
  void validate() const;
  double total_load_mw() const;
  double region_load_mw(Region r) const;
};

/// Bus CSV header:
///   id,name,type,region,zone,p_load_mw,q_load_mvar,p_gen_mw,v_set_pu,generators
/// with type in {slack, pv, pq} and generators a ';'-separated list (may be empty).
/// Branch CSV header: from,to,r_pu,x_pu,b_pu
BusNetwork read_network(std::istream& buses, std::istream& branches,
                        double base_mva = kDefaultBaseMva);
BusNetwork load_network(const std::filesystem::path& buses, const std::filesystem::path& branches,
                        double base_mva = kDefaultBaseMva);

void write_network(const BusNetwork& net, std::ostream& buses, std::ostream& branches);

}  // namespace gridstudy::powerflow
