#include "gridstudy/market/fleet.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace gridstudy::market {

void Generator::validate() const {
  if (!(capacity_mw >= 0.0)) throw std::invalid_argument(name + ": capacity must be >= 0");
  if (!(min_stable_mw >= 0.0 && min_stable_mw <= capacity_mw)) {
    throw std::invalid_argument(name + ": minimum stable level must lie in [0, capacity]");
  }
  if (!(srmc >= 0.0)) throw std::invalid_argument(name + ": srmc must be >= 0");
  if (renewable() && srmc != 0.0) throw std::invalid_argument(name + ": renewable srmc must be 0");
  if (renewable() && !availability) {
    throw std::invalid_argument(name + ": renewable unit needs an availability trace");
  }
}

std::string Interconnector::name() const {
  return fmt::format("{}-{}", to_string(from), to_string(to));
}

void Interconnector::validate() const {
  if (from == to) throw std::invalid_argument("interconnector endpoints must differ");
  if (!(reverse_mw <= 0.0 && 0.0 <= forward_mw)) {
    throw std::invalid_argument(name() + ": limits must satisfy reverse <= 0 <= forward");
  }
}

Generator make_generator(const GeneratorSpec& spec,
                         const std::map<std::string, TimeSeries>& availability) {
  Generator g;
  g.name = spec.name;
  g.type = spec.type;
  g.zone = spec.zone;
  g.region = spec.region;
  g.capacity_mw = spec.capacity_mw;
  g.srmc = spec.srmc;
  g.min_stable_mw =
      spec.min_stable_mw.value_or(is_coal(spec.type) ? kCoalMinStableFraction * spec.capacity_mw : 0.0);
  if (spec.availability) {
    auto it = availability.find(*spec.availability);
    if (it == availability.end()) {
      throw std::invalid_argument(spec.name + ": no availability trace '" + *spec.availability + "'");
    }
    g.availability = it->second;
  }
  g.validate();
  return g;
}

Fleet make_fleet(const std::vector<GeneratorSpec>& specs,
                 const std::map<std::string, TimeSeries>& availability) {
  Fleet fleet;
  fleet.reserve(specs.size());
  for (const auto& s : specs) fleet.push_back(make_generator(s, availability));
  return fleet;
}

std::vector<Interconnector> make_interconnectors(const std::vector<InterconnectorSpec>& specs) {
  std::vector<Interconnector> out;
  for (const auto& s : specs) {
    Interconnector ic{s.from, s.to, s.forward_mw, s.reverse_mw};
    ic.validate();
    out.push_back(ic);
  }
  return out;
}

TimeSeries csp_profile_shift(const TimeSeries& availability, int delay_hours) {
  if (delay_hours < 0) throw std::invalid_argument("CSP delay must be >= 0");
  if (availability.size() % 24 != 0) {
    throw std::invalid_argument("CSP availability must cover a whole number of days");
  }
  const auto src = availability.values();
  std::vector<double> out(src.size());
  const std::size_t shift = static_cast<std::size_t>(delay_hours) % 24;
  for (std::size_t day = 0; day < src.size() / 24; ++day) {
    for (std::size_t h = 0; h < 24; ++h) {
      out[day * 24 + h] = src[day * 24 + (h + 24 - shift) % 24];
    }
  }
  return {availability.start(), std::move(out), availability.label()};
}

}  // namespace gridstudy::market
