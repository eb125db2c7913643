#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "swof/config.hpp"
#include "swof/io.hpp"

namespace swof {

struct RunOptions {
  bool quiet = false;
  /// Replaces config.output_dir when not empty.
  std::string output_dir;
  /// Progress and warnings; std::cerr when null.
  std::ostream* log = nullptr;
};

struct RunSummary {
  long steps = 0;
  long retries = 0;  // step halvings after a failed stage
  double final_time = 0.0;
  double wall_seconds = 0.0;
  double min_h = 0.0;
  double max_h = 0.0;
  double residual = 0.0;
  MassBalanceReport balance;
  std::vector<HydrographSample> hydrograph;
  std::vector<std::string> outputs;
};

/// "swof <version>, config <hash>", written at the top of every output file.
std::string provenance(const SimulationConfig& config);

/// Bed step across each interior face, compared with the mean wet depth.
struct MeshCheck {
  double mean_wet_depth = 0.0;
  double max_face_step = 0.0;
  bool coarse() const { return mean_wet_depth > 0.0 && mean_wet_depth < max_face_step; }
};

MeshCheck check_mesh(const StructuredGrid& grid, const Topography& topo, const FlowState& state,
                     double h_dry);

/**
 * Runs heun_step from t = 0 to config.t_end. Steps are clipped so that every
 * multiple of output_interval and t_end is hit exactly. At t = 0 and at each
 * output time a snapshot_NNNN.txt is written; hydrograph.txt and
 * mass_balance.txt are written at the end.
 *
 * The hydrograph holds the outlet outflow volume of each output interval
 * divided by its length; it is empty when no outlet is set.
 */
RunSummary run_simulation(const SimulationConfig& config, const SimulationInputs& inputs,
                          const RunOptions& options = {});

RunSummary run_simulation(const SimulationConfig& config, const RunOptions& options = {});

}  // namespace swof
