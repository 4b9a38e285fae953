#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "dkf/sim.hpp"

namespace dkf {

// A scenario file plus the run settings that may live alongside it.
struct ScenarioConfig {
  Scenario scenario;
  std::optional<std::string> out_dir;
  std::optional<int> seeds;
};

// Parses a JSON scenario config. Unknown keys are rejected; every error names
// the offending key path (e.g. "model.Q: required"). The returned scenario is
// not yet validated.
ScenarioConfig parse_scenario_config(const std::string& text,
                                     std::string_view source_name = "<config>");

ScenarioConfig load_scenario_config(const std::filesystem::path& path);

}  // namespace dkf
