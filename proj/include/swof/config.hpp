#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swof/io.hpp"
#include "swof/stepper.hpp"

namespace swof {

enum class InitialKind { uniform_depth, depth_file, surface_level };

/// Initial water: uniform depth, a depth grid (ESRI ASCII) or a lake-at-rest level.
struct InitialCondition {
  InitialKind kind = InitialKind::uniform_depth;
  double value = 0.0;
  std::string path;
};

struct SimulationConfig {
  std::string dem_file;
  double t_end = 0.0;
  double output_interval = 0.0;
  StepConfig step;
  InitialCondition initial;
  std::string rain_file;  // empty: no rain
  std::string output_dir = "output";
  std::optional<Side> outlet;
  /// "key = value" lines as given, after overrides, sorted by key.
  std::string canonical;

  /// 64-bit FNV-1a of `canonical`, as 16 hex digits.
  std::string hash() const;
};

struct ConfigEntry {
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

using ConfigEntries = std::map<std::string, ConfigEntry, std::less<>>;

/// Reads "key = value" lines; '#' starts a comment. Throws FormatError on malformed lines.
ConfigEntries read_config_entries(const std::string& path);

/// Applies "key=value"; the key is checked later, with the others.
void apply_override(ConfigEntries& entries, std::string_view assignment);

/**
 * Validates entries and fills defaults (g = 9.81, order = 2, cfl = 0.5 at
 * order 2 and 1 at order 1, friction and infiltration none, walls). Throws
 * ConfigError naming the key and line for unknown keys, unparsable values,
 * missing mandatory keys (dem_file, t_end) and missing dependent keys.
 */
SimulationConfig build_config(const ConfigEntries& entries);

SimulationConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Grid, bed, initial state and rain referenced by a configuration.
struct SimulationInputs {
  StructuredGrid grid;
  Topography topography;
  FlowState initial;
  RainfallForcing rain;
};

/// Reads every file the configuration references.
SimulationInputs load_inputs(const SimulationConfig& config);

}  // namespace swof
