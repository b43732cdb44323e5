#pragma once
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cara/harness.hpp"

namespace cara {

// Shared settings, overridable per scenario.
struct ConfigDefaults {
  std::uint64_t seed = 1;
  std::size_t reps = 10000;
  std::size_t n = 500;
  std::size_t workers = 0;  // 0 = CARA_WORKERS or hardware concurrency
  std::string out = "results";
};

struct ConfigFile {
  std::string path;
  std::string source;  // file text plus applied overrides
  ConfigDefaults defaults;
  PopulationSpec population = continuous_three_strata_model();
  std::vector<ScenarioConfig> scenarios;

  const ScenarioConfig& scenario(const std::string& id) const;
};

// Parses a YAML scenario file. Unknown keys, wrong types and invalid values
// raise ConfigError naming the key and its line.
ConfigFile parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                        const std::string& path = "<string>");
ConfigFile load_config(const std::string& path, const std::vector<std::string>& overrides = {});

// Stand-alone parsers for the config sub-schemas (YAML text of one node).
PopulationSpec parse_population(const std::string& yaml_text);
RandomizerSpec parse_randomizer(const std::string& yaml_text);
AllocationTargetSpec parse_target(const std::string& yaml_text);

}  // namespace cara
