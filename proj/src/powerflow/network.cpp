#include "gridstudy/powerflow/network.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "gridstudy/timeseries/time_series.hpp"

namespace gridstudy::powerflow {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  for (;;) {
    const auto end = line.find(sep, begin);
    out.push_back(line.substr(begin, end - begin));
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double to_double(const std::string& s, std::size_t row, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(fmt::format("row {}: bad {} '{}'", row, what, s), row);
  }
  return v;
}

int to_int(const std::string& s, std::size_t row, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(fmt::format("row {}: bad {} '{}'", row, what, s), row);
  }
  return v;
}

/// Reads rows after checking the header; calls `fn(fields, row)` per line.
template <typename Fn>
void read_rows(std::istream& in, const std::string& header, std::size_t ncols, Fn fn) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != header) {
    throw DataError("expected header '" + header + "'", 1);
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != ncols) {
      throw DataError(fmt::format("row {}: expected {} fields, got {}", row, ncols, fields.size()),
                      row);
    }
    fn(fields, row);
  }
}

const char* type_name(BusType t) {
  switch (t) {
    case BusType::Slack: return "slack";
    case BusType::PV: return "pv";
    case BusType::PQ: return "pq";
  }
  return "pq";
}

}  // namespace

std::size_t BusNetwork::position(int id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == id) return i;
  }
  throw std::out_of_range(fmt::format("unknown bus {}", id));
}

std::size_t BusNetwork::slack_position() const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].type == BusType::Slack) return i;
  }
  throw std::invalid_argument("network has no slack bus");
}

void BusNetwork::validate() const {
  if (!(base_mva > 0.0)) throw std::invalid_argument("base MVA must be positive");
  if (buses.empty()) throw std::invalid_argument("network has no buses");
  const auto slacks = std::count_if(buses.begin(), buses.end(),
                                    [](const Bus& b) { return b.type == BusType::Slack; });
  if (slacks != 1) {
    throw std::invalid_argument(fmt::format("network needs exactly one slack bus, found {}", slacks));
  }
  std::set<int> ids;
  for (const auto& b : buses) {
    if (!ids.insert(b.id).second) throw std::invalid_argument(fmt::format("duplicate bus id {}", b.id));
    if (!(b.v_set_pu > 0.0)) throw std::invalid_argument(fmt::format("bus {}: bad setpoint", b.id));
  }
  std::vector<std::size_t> parent(buses.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& br : branches) {
    if (!ids.count(br.from) || !ids.count(br.to)) {
      throw std::invalid_argument(fmt::format("branch {}-{} references an unknown bus", br.from, br.to));
    }
    if (br.from == br.to) throw std::invalid_argument(fmt::format("branch {} is a self loop", br.from));
    if (br.x_pu == 0.0) {
      throw std::invalid_argument(fmt::format("branch {}-{} has zero reactance", br.from, br.to));
    }
    parent[find(position(br.from))] = find(position(br.to));
  }
  const auto root = find(0);
  for (std::size_t i = 1; i < buses.size(); ++i) {
    if (find(i) != root) {
      throw std::invalid_argument(fmt::format("bus {} is not connected to the network", buses[i].id));
    }
  }
}

double BusNetwork::total_load_mw() const {
  double s = 0.0;
  for (const auto& b : buses) s += b.p_load_mw;
  return s;
}

double BusNetwork::region_load_mw(Region r) const {
  double s = 0.0;
  for (const auto& b : buses) {
    if (b.region == r) s += b.p_load_mw;
  }
  return s;
}

BusNetwork read_network(std::istream& bus_in, std::istream& branch_in, double base_mva) {
  BusNetwork net;
  net.base_mva = base_mva;
  read_rows(bus_in, "id,name,type,region,zone,p_load_mw,q_load_mvar,p_gen_mw,v_set_pu,generators",
            10, [&](const std::vector<std::string>& f, std::size_t row) {
              Bus b;
              b.id = to_int(f[0], row, "bus id");
              b.name = f[1];
              if (f[2] == "slack") {
                b.type = BusType::Slack;
              } else if (f[2] == "pv") {
                b.type = BusType::PV;
              } else if (f[2] == "pq") {
                b.type = BusType::PQ;
              } else {
                throw DataError(fmt::format("row {}: unknown bus type '{}'", row, f[2]), row);
              }
              const auto region = parse_region(f[3]);
              if (!region) throw DataError(fmt::format("row {}: unknown region '{}'", row, f[3]), row);
              b.region = *region;
              b.zone = f[4];
              b.p_load_mw = to_double(f[5], row, "p_load_mw");
              b.q_load_mvar = to_double(f[6], row, "q_load_mvar");
              b.p_gen_mw = to_double(f[7], row, "p_gen_mw");
              b.v_set_pu = to_double(f[8], row, "v_set_pu");
              if (!f[9].empty()) b.generators = split(f[9], ';');
              net.buses.push_back(std::move(b));
            });
  read_rows(branch_in, "from,to,r_pu,x_pu,b_pu", 5,
            [&](const std::vector<std::string>& f, std::size_t row) {
              net.branches.push_back({to_int(f[0], row, "from"), to_int(f[1], row, "to"),
                                      to_double(f[2], row, "r_pu"), to_double(f[3], row, "x_pu"),
                                      to_double(f[4], row, "b_pu")});
            });
  net.validate();
  return net;
}

BusNetwork load_network(const std::filesystem::path& buses, const std::filesystem::path& branches,
                        double base_mva) {
  std::ifstream b(buses);
  if (!b) throw DataError("cannot open " + buses.string());
  std::ifstream br(branches);
  if (!br) throw DataError("cannot open " + branches.string());
  try {
    return read_network(b, br, base_mva);
  } catch (const DataError& e) {
    throw DataError(buses.parent_path().string() + ": " + e.what(), e.row());
  }
}

void write_network(const BusNetwork& net, std::ostream& buses, std::ostream& branches) {
  buses << "id,name,type,region,zone,p_load_mw,q_load_mvar,p_gen_mw,v_set_pu,generators\n";
  for (const auto& b : net.buses) {
    std::string gens;
    for (std::size_t i = 0; i < b.generators.size(); ++i) {
      if (i) gens += ';';
      gens += b.generators[i];
    }
    buses << b.id << ',' << b.name << ',' << type_name(b.type) << ',' << to_string(b.region) << ','
          << b.zone << ',' << format_exact(b.p_load_mw) << ',' << format_exact(b.q_load_mvar) << ','
          << format_exact(b.p_gen_mw) << ',' << format_exact(b.v_set_pu) << ',' << gens << '\n';
  }
  branches << "from,to,r_pu,x_pu,b_pu\n";
  for (const auto& br : net.branches) {
    branches << br.from << ',' << br.to << ',' << format_exact(br.r_pu) << ','
             << format_exact(br.x_pu) << ',' << format_exact(br.b_pu) << '\n';
  }
}

}  // namespace gridstudy::powerflow
