#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "rssdgeo/model.hpp"

namespace rssdgeo {

/// Scenario plus the reference power used when simulating measurements.
struct ScenarioDocument {
  Scenario scenario;
  double p0 = 0.0;
};

/// Parses the JSON scenario format:
///
///   {
///     "source": {"x": 0, "y": 0, "p0": -30},
///     "gamma": 2,
///     "sensors": [{"r": 1000, "h": 100, "sigma": 2.0}, ...],
///     "samples_per_position": 10,
///     "beta_max_deg": 120,
///     "variant": "RSSD"
///   }
///
/// Each sensor gives either "sigma" (dB) or "sigma2" (dB^2). Angles are in
/// degrees on disk and radians in memory. Throws ConfigError with a field
/// path, or with line/column for syntax errors.
ScenarioDocument parse_scenario(std::string_view json_text);
ScenarioDocument load_scenario(const std::filesystem::path& path);

std::string to_json(const ScenarioDocument& doc);

/// FNV-1a over the canonical JSON form.
std::uint64_t scenario_hash(const ScenarioDocument& doc);

}  // namespace rssdgeo
