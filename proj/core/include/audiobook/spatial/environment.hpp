#pragma once

#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "audiobook/spatial/sdn.hpp"

namespace audiobook {

struct EnvironmentPreset {
  Vec3 dimensions;
  double absorption = 0.35;
  double wet_ratio = 0.2;
};

// Presets keyed by id, loaded from JSON of the form
//   {"room": {"dimensions": [x, y, z], "absorption": a, "wet_ratio": w}, ...}
class EnvironmentTable {
 public:
  static EnvironmentTable parse(std::string_view json_text);
  static const EnvironmentTable& builtin();

  // Returns a copy with fields of `overrides` (same shape, partial entries
  // allowed) replacing or adding presets.
  EnvironmentTable with_overrides(const nlohmann::json& overrides) const;
  const EnvironmentPreset& at(const std::string& id) const;
  bool contains(const std::string& id) const { return presets_.contains(id); }
  const std::map<std::string, EnvironmentPreset>& presets() const { return presets_; }

 private:
  std::map<std::string, EnvironmentPreset> presets_;
};

}  // namespace audiobook
