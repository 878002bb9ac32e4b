#pragma once

// Power-flow test networks and an injection check that builds its own
// admittance matrix. Only the network types come from the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "gridstudy/powerflow/network.hpp"
#include "gridstudy/powerflow/newton_raphson.hpp"

namespace oracle {

using namespace gridstudy;
using namespace gridstudy::powerflow;

inline Bus bus(int id, BusType type, Region region, double p, double q, double v = 1.0, double gen = 0.0) {
  Bus b;
  b.id = id;
  b.name = "B" + std::to_string(id);
  b.type = type;
  b.region = region;
  b.zone = "Z";
  b.p_load_mw = p;
  b.q_load_mvar = q;
  b.v_set_pu = v;
  b.p_gen_mw = gen;
  return b;
}

// Slack at 1.0 p.u. feeding a unity power factor load over x = 0.1 p.u.
inline BusNetwork two_bus(double load_pu) {
  BusNetwork net;
  net.buses = {bus(1, BusType::Slack, Region::NSW, 0.0, 0.0), bus(2, BusType::PQ, Region::QLD, 100.0 * load_pu, 0.0)};
  net.branches = {{1, 2, 0.0, 0.1, 0.0}};
  return net;
}

inline BusNetwork three_bus() {
  BusNetwork net;
  net.buses = {bus(1, BusType::Slack, Region::NSW, 0.0, 0.0, 1.05),
               bus(2, BusType::PV, Region::VIC, 50.0, 0.0, 1.04, 200.0),
               bus(3, BusType::PQ, Region::QLD, 300.0, 120.0)};
  net.branches = {{1, 2, 0.02, 0.04, 0.0}, {1, 3, 0.01, 0.03, 0.02}, {2, 3, 0.0125, 0.025, 0.0}};
  return net;
}

// Bundled network with each region's load shared equally by its PV buses.
inline BusNetwork bundled_operating_point() {
  const std::filesystem::path dir = GRIDSTUDY_DATA_DIR;
  auto net = load_network(dir / "network_buses.csv", dir / "network_branches.csv");
  for (Region r : kDemandRegions) {
    std::size_t pv = 0;
    for (const auto& b : net.buses) pv += b.region == r && b.type == BusType::PV;
    for (auto& b : net.buses) {
      if (b.region == r && b.type == BusType::PV) b.p_gen_mw = net.region_load_mw(r) / static_cast<double>(pv);
    }
  }
  return net;
}

// Complex power injections recomputed from voltages with a separately built admittance matrix.
inline std::vector<std::complex<double>> injections_from_voltages(const BusNetwork& net, const PowerFlowSolution& s) {
  using C = std::complex<double>;
  const std::size_t n = net.buses.size();
  std::vector<std::vector<C>> y(n, std::vector<C>(n, 0.0));
  for (const auto& br : net.branches) {
    const std::size_t i = net.position(br.from);
    const std::size_t j = net.position(br.to);
    const C ys = 1.0 / C(br.r_pu, br.x_pu);
    const C sh(0.0, br.b_pu / 2.0);
    y[i][i] += ys + sh;
    y[j][j] += ys + sh;
    y[i][j] -= ys;
    y[j][i] -= ys;
  }
  std::vector<C> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::polar(s.vm_pu[i], s.va_rad[i]);
  std::vector<C> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    C current = 0.0;
    for (std::size_t k = 0; k < n; ++k) current += y[i][k] * v[k];
    out[i] = v[i] * std::conj(current);
  }
  return out;
}

inline double worst_mismatch(const BusNetwork& net, const PowerFlowSolution& s) {
  const auto inj = injections_from_voltages(net, s);
  double worst = 0.0;
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const auto& b = net.buses[i];
    if (b.type == BusType::Slack) continue;
    const double p_spec = (b.p_gen_mw - b.p_load_mw) / net.base_mva;
    worst = std::max(worst, std::abs(inj[i].real() - p_spec));
    if (b.type == BusType::PQ) {
      worst = std::max(worst, std::abs(inj[i].imag() + b.q_load_mvar / net.base_mva));
    }
  }
  return worst;
}

}  // namespace oracle
