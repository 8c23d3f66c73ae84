#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmod/metrics.h"
#include "qmod/scaling_model.h"
#include "qmod/sim_kernel.h"

namespace qmod {

inline constexpr int kScenarioSchemaVersion = 1;

// Parsed scenario document. Every section is optional in the file; absent
// sections keep their defaults. Unknown keys anywhere are errors.
struct ScenarioFile {
  SimConfig sim;
  MetricsSettings metrics;
  bool has_seed = false;
  bool has_scaling = false;
  std::vector<PlatformProfile> profiles;  // custom platform profiles for `nops`
  nlohmann::ordered_json annotations = nlohmann::ordered_json::object();
};

// `base_dir` resolves relative trace_file paths.
ScenarioFile parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ScenarioFile parse_scenario_text(const std::string& text, const std::filesystem::path& base_dir = {});
ScenarioFile load_scenario(const std::filesystem::path& path);

// Canonical form: every field written, durations as "<n>ns", trace arrivals inline.
// parse_scenario(serialize_scenario(s)) reproduces s.
nlohmann::ordered_json serialize_scenario(const ScenarioFile& s);

// FNV-1a over the canonical dump, as 16 hex digits.
std::string config_hash(const ScenarioFile& s);

}  // namespace qmod
