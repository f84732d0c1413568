#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace physr {

// Scalar (lo == hi) or closed range [lo, hi] in canonical SI units.
struct PropertyValue {
  double lo = 0.0;
  double hi = 0.0;

  static PropertyValue scalar(double v) { return {v, v}; }
  bool is_range() const { return lo != hi; }
  double mid() const { return 0.5 * (lo + hi); }
  bool operator==(const PropertyValue&) const = default;
};

// Canonical property names and the unit each is stored in:
//   density               kg/m^3
//   elastic_modulus       GPa
//   hardness_shore        Shore
//   thermal_conductivity  W/(mK)
//   friction              dimensionless
inline constexpr std::string_view kDensity = "density";
inline constexpr std::string_view kElasticModulus = "elastic_modulus";
inline constexpr std::string_view kHardnessShore = "hardness_shore";
inline constexpr std::string_view kThermalConductivity = "thermal_conductivity";
inline constexpr std::string_view kFriction = "friction";

const std::vector<std::string>& known_property_names();
std::string_view canonical_unit(std::string_view property);

struct MaterialEntry {
  std::string name;
  std::map<std::string, PropertyValue> properties;
  double thickness = 0.0;  // metres

  bool operator==(const MaterialEntry&) const = default;
};

struct MaterialDictionary {
  std::vector<MaterialEntry> entries;
  std::string source = "file";  // "file" or "llm"

  std::size_t size() const { return entries.size(); }
  std::vector<std::string> names() const;
  // Property names present on every entry, sorted.
  std::vector<std::string> shared_properties() const;
  bool operator==(const MaterialDictionary&) const = default;
};

// Throws ValidationError on an empty list, duplicate names, non-positive
// thickness, inverted ranges, unknown property names or unknown units.
void validate(const MaterialDictionary& dict);

MaterialDictionary parse_materials(std::string_view json_text);
MaterialDictionary load_materials(const std::filesystem::path& path);
std::string materials_to_json(const MaterialDictionary& dict);
void save_materials(const std::filesystem::path& path, const MaterialDictionary& dict);

}  // namespace physr
