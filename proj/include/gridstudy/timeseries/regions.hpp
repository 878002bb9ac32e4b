#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace gridstudy {

/// Market regions of the study network. The numbering follows the five areas
/// of the reduced NEM model: Snowy Hydro, NSW, VIC, QLD, SA.
enum class Region : std::size_t { SH = 0, NSW = 1, VIC = 2, QLD = 3, SA = 4 };

inline constexpr std::size_t kRegionCount = 5;

inline constexpr std::array<Region, kRegionCount> kAllRegions = {
    Region::SH, Region::NSW, Region::VIC, Region::QLD, Region::SA};

/// Regions that carry customer demand (Snowy Hydro is a transit area).
inline constexpr std::array<Region, 4> kDemandRegions = {
    Region::QLD, Region::NSW, Region::VIC, Region::SA};

/// Fixed-size per-region table.
template <typename T>
using RegionArray = std::array<T, kRegionCount>;

constexpr std::size_t index_of(Region r) { return static_cast<std::size_t>(r); }

std::string_view to_string(Region r);
std::optional<Region> parse_region(std::string_view name);
/// Like parse_region but throws std::invalid_argument on unknown names.
Region region_from_string(std::string_view name);

enum class GenType : std::size_t {
  BlackCoal = 0,
  BrownCoal,
  GasTurbine,
  Biomass,
  Hydro,
  Wind,
  Csp,
  UtilityPv,
};

inline constexpr std::size_t kGenTypeCount = 8;

inline constexpr std::array<GenType, kGenTypeCount> kAllGenTypes = {
    GenType::BlackCoal, GenType::BrownCoal, GenType::GasTurbine, GenType::Biomass,
    GenType::Hydro,     GenType::Wind,      GenType::Csp,        GenType::UtilityPv};

constexpr std::size_t index_of(GenType t) { return static_cast<std::size_t>(t); }

std::string_view to_string(GenType t);
std::optional<GenType> parse_gen_type(std::string_view name);
GenType gen_type_from_string(std::string_view name);

/// Intermittent units bid at zero SRMC and follow an availability trace.
constexpr bool is_renewable(GenType t) {
  return t == GenType::Wind || t == GenType::Csp || t == GenType::UtilityPv;
}

constexpr bool is_coal(GenType t) { return t == GenType::BlackCoal || t == GenType::BrownCoal; }

enum class Uptake { None, Low, Medium, High };

std::string_view to_string(Uptake u);
std::optional<Uptake> parse_uptake(std::string_view name);

}  // namespace gridstudy
