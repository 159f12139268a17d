#include "audiobook/spatial/environment.hpp"

#include <stdexcept>

#include "audiobook/data.hpp"

namespace audiobook {
namespace {

void apply_fields(EnvironmentPreset& p, const std::string& id, const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("environment '" + id + "' must be an object");
  if (j.contains("dimensions")) {
    const auto& d = j.at("dimensions");
    if (!d.is_array() || d.size() != 3) throw std::invalid_argument("environment '" + id + "': dimensions must be [x, y, z]");
    p.dimensions = {d[0].get<double>(), d[1].get<double>(), d[2].get<double>()};
  }
  if (j.contains("absorption")) p.absorption = j.at("absorption").get<double>();
  if (j.contains("wet_ratio")) p.wet_ratio = j.at("wet_ratio").get<double>();
  if (!(p.dimensions.x > 0 && p.dimensions.y > 0 && p.dimensions.z > 0)) {
    throw std::invalid_argument("environment '" + id + "': dimensions must be positive");
  }
  if (!(p.absorption > 0.0 && p.absorption <= 1.0)) {
    throw std::invalid_argument("environment '" + id + "': absorption must be in (0, 1]");
  }
  if (!(p.wet_ratio >= 0.0 && p.wet_ratio <= 1.0)) {
    throw std::invalid_argument("environment '" + id + "': wet_ratio must be in [0, 1]");
  }
}

}  // namespace

EnvironmentTable EnvironmentTable::parse(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("environment table: ") + e.what());
  }
  EnvironmentTable t;
  return t.with_overrides(j);
}

const EnvironmentTable& EnvironmentTable::builtin() {
  static const EnvironmentTable table = parse(data::environments);
  return table;
}

EnvironmentTable EnvironmentTable::with_overrides(const nlohmann::json& overrides) const {
  if (!overrides.is_object()) throw std::invalid_argument("environment overrides must be an object");
  EnvironmentTable out = *this;
  for (const auto& [id, fields] : overrides.items()) {
    auto it = out.presets_.find(id);
    EnvironmentPreset p = it != out.presets_.end() ? it->second : EnvironmentPreset{};
    if (it == out.presets_.end() && !fields.contains("dimensions")) {
      throw std::invalid_argument("new environment '" + id + "' needs dimensions");
    }
    try {
      apply_fields(p, id, fields);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("environment '" + id + "': " + e.what());
    }
    out.presets_[id] = p;
  }
  return out;
}

const EnvironmentPreset& EnvironmentTable::at(const std::string& id) const {
  auto it = presets_.find(id);
  if (it == presets_.end()) throw std::invalid_argument("unknown environment '" + id + "'");
  return it->second;
}

}  // namespace audiobook
