#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dln {

struct Preset {
  std::string name;
  std::string description;
  /// Complete config document with the preset's defaults.
  nlohmann::json defaults;
};

/// diag-d2, diag-d20, upper-T, cycle-3x3, rank1-manifold.
const std::vector<Preset>& presets();

/// Throws ConfigError for an unknown name.
const Preset& find_preset(const std::string& name);

}  // namespace dln
