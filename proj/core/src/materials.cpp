#include "physr/materials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "physr/errors.hpp"

namespace physr {
namespace {

using nlohmann::json;

struct UnitRule {
  std::string_view unit;
  double to_canonical;
};

// Accepted spellings per property; the first is canonical.
const std::map<std::string_view, std::vector<UnitRule>>& unit_table() {
  static const std::map<std::string_view, std::vector<UnitRule>> table = {
      {kDensity, {{"kg/m^3", 1.0}, {"kg/m3", 1.0}, {"g/cm^3", 1000.0}, {"g/cm3", 1000.0}}},
      {kElasticModulus, {{"GPa", 1.0}, {"MPa", 1e-3}, {"Pa", 1e-9}}},
      {kHardnessShore, {{"Shore", 1.0}, {"Shore A", 1.0}, {"Shore D", 1.0}}},
      {kThermalConductivity, {{"W/(mK)", 1.0}, {"W/(m*K)", 1.0}, {"W/mK", 1.0}, {"W/m/K", 1.0}}},
      {kFriction, {{"", 1.0}, {"1", 1.0}}},
  };
  return table;
}

const std::vector<UnitRule> kThicknessUnits = {{"m", 1.0}, {"cm", 0.01}, {"mm", 0.001}};

double unit_factor(const std::vector<UnitRule>& rules, const std::string& unit, const std::string& where) {
  for (const auto& r : rules) {
    if (r.unit == unit) return r.to_canonical;
  }
  throw ValidationError(where + ": unrecognised unit '" + unit + "'");
}

double finite_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(where + ": non-finite value");
  return v;
}

PropertyValue parse_value(const json& j, double factor, const std::string& where) {
  if (j.is_array()) {
    if (j.size() != 2) throw ValidationError(where + ": range must be [min, max]");
    return {finite_number(j[0], where) * factor, finite_number(j[1], where) * factor};
  }
  return PropertyValue::scalar(finite_number(j, where) * factor);
}

PropertyValue parse_property(const std::string& prop, const json& j, const std::string& where) {
  const auto rules = unit_table().find(prop);
  if (rules == unit_table().end()) throw ValidationError(where + ": unknown property '" + prop + "'");
  if (j.is_object()) {
    if (!j.contains("value")) throw ValidationError(where + ": object form needs 'value'");
    const std::string unit = j.value("unit", std::string(rules->second.front().unit));
    return parse_value(j.at("value"), unit_factor(rules->second, unit, where), where);
  }
  return parse_value(j, 1.0, where);
}

double parse_thickness(const json& j, const std::string& where) {
  if (j.is_object()) {
    if (!j.contains("value")) throw ValidationError(where + ": object form needs 'value'");
    const std::string unit = j.value("unit", std::string("m"));
    return finite_number(j.at("value"), where) * unit_factor(kThicknessUnits, unit, where);
  }
  return finite_number(j, where);
}

}  // namespace

const std::vector<std::string>& known_property_names() {
  static const std::vector<std::string> names = {std::string(kDensity), std::string(kElasticModulus),
                                                 std::string(kHardnessShore),
                                                 std::string(kThermalConductivity), std::string(kFriction)};
  return names;
}

std::string_view canonical_unit(std::string_view property) {
  const auto it = unit_table().find(property);
  if (it == unit_table().end()) throw ValidationError("unknown property '" + std::string(property) + "'");
  return it->second.front().unit;
}

std::vector<std::string> MaterialDictionary::names() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.name);
  return out;
}

std::vector<std::string> MaterialDictionary::shared_properties() const {
  std::vector<std::string> out;
  if (entries.empty()) return out;
  for (const auto& [name, value] : entries.front().properties) {
    const bool everywhere = std::all_of(entries.begin(), entries.end(),
                                        [&](const MaterialEntry& e) { return e.properties.contains(name); });
    if (everywhere) out.push_back(name);
  }
  return out;
}

void validate(const MaterialDictionary& dict) {
  if (dict.entries.empty()) throw ValidationError("material dictionary is empty");
  if (dict.source != "file" && dict.source != "llm") {
    throw ValidationError("material source must be 'file' or 'llm', got '" + dict.source + "'");
  }
  std::set<std::string> seen;
  for (const auto& e : dict.entries) {
    if (e.name.empty()) throw ValidationError("material with empty name");
    if (!seen.insert(e.name).second) throw ValidationError("duplicate material '" + e.name + "'");
    if (!(e.thickness > 0.0) || !std::isfinite(e.thickness)) {
      throw ValidationError("material '" + e.name + "': thickness must be positive");
    }
    for (const auto& [prop, value] : e.properties) {
      if (!unit_table().contains(prop)) {
        throw ValidationError("material '" + e.name + "': unknown property '" + prop + "'");
      }
      if (!std::isfinite(value.lo) || !std::isfinite(value.hi)) {
        throw ValidationError("material '" + e.name + "': non-finite " + prop);
      }
      if (value.lo > value.hi) {
        throw ValidationError("material '" + e.name + "': " + prop + " range has min > max");
      }
    }
  }
}

MaterialDictionary parse_materials(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("materials: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("materials") || !doc.at("materials").is_array()) {
    throw ValidationError("materials: expected an object with a 'materials' array");
  }
  MaterialDictionary dict;
  dict.source = doc.value("source", std::string("file"));
  for (std::size_t i = 0; i < doc.at("materials").size(); ++i) {
    const json& m = doc.at("materials")[i];
    const std::string where = "materials[" + std::to_string(i) + "]";
    if (!m.is_object() || !m.contains("name") || !m.at("name").is_string()) {
      throw ValidationError(where + ": missing 'name'");
    }
    if (!m.contains("thickness")) throw ValidationError(where + ": missing 'thickness'");
    MaterialEntry entry;
    entry.name = m.at("name").get<std::string>();
    entry.thickness = parse_thickness(m.at("thickness"), where + ".thickness");
    if (m.contains("properties")) {
      if (!m.at("properties").is_object()) throw ValidationError(where + ": 'properties' must be an object");
      for (const auto& [prop, value] : m.at("properties").items()) {
        entry.properties[prop] = parse_property(prop, value, where + "." + prop);
      }
    }
    dict.entries.push_back(std::move(entry));
  }
  validate(dict);
  return dict;
}

MaterialDictionary load_materials(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "missing or unreadable materials file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_materials(buffer.str());
}

std::string materials_to_json(const MaterialDictionary& dict) {
  json doc;
  doc["source"] = dict.source;
  doc["materials"] = json::array();
  for (const auto& e : dict.entries) {
    json m;
    m["name"] = e.name;
    m["thickness"] = e.thickness;
    json props = json::object();
    for (const auto& [prop, value] : e.properties) {
      props[prop] = value.is_range() ? json::array({value.lo, value.hi}) : json(value.lo);
    }
    m["properties"] = std::move(props);
    doc["materials"].push_back(std::move(m));
  }
  return doc.dump(2);
}

void save_materials(const std::filesystem::path& path, const MaterialDictionary& dict) {
  validate(dict);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << materials_to_json(dict) << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace physr
