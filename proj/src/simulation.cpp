#include "swof/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "swof/errors.hpp"

namespace swof {

namespace {

std::string snapshot_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%04d.txt", index);
  return buf;
}

std::pair<double, double> depth_range(const FlowState& state, const StructuredGrid& grid) {
  double lo = state.h(0, 0), hi = lo;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      lo = std::min(lo, state.h(i, j));
      hi = std::max(hi, state.h(i, j));
    }
  }
  return {lo, hi};
}

}  // namespace

std::string provenance(const SimulationConfig& config) {
  return std::string("swof ") + SWOF_VERSION + ", config " + config.hash();
}

MeshCheck check_mesh(const StructuredGrid& grid, const Topography& topo, const FlowState& state,
                     double h_dry) {
  MeshCheck check;
  double wet_sum = 0.0;
  long wet = 0;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (state.h(i, j) >= h_dry) {
        wet_sum += state.h(i, j);
        ++wet;
      }
      if (i + 1 < grid.nx) check.max_face_step = std::max(check.max_face_step, std::abs(topo.z(i + 1, j) - topo.z(i, j)));
      if (j + 1 < grid.ny) check.max_face_step = std::max(check.max_face_step, std::abs(topo.z(i, j + 1) - topo.z(i, j)));
    }
  }
  check.mean_wet_depth = wet > 0 ? wet_sum / static_cast<double>(wet) : 0.0;
  return check;
}

RunSummary run_simulation(const SimulationConfig& config, const SimulationInputs& inputs,
                          const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  std::ostream& log = options.log ? *options.log : std::cerr;
  const std::string out_dir = options.output_dir.empty() ? config.output_dir : options.output_dir;
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  const std::string tag = provenance(config);

  StepConfig step_config = config.step;
  step_config.rain = inputs.rain;
  Stepper stepper(inputs.grid, inputs.topography, step_config);
  const StructuredGrid& grid = stepper.grid();

  FlowState state = inputs.initial;
  state.time = 0.0;
  InfiltrationState infiltration(grid);

  RunSummary summary;
  MassBalanceReport& balance = summary.balance;
  balance.initial = total_water_volume(state, grid);

  const MeshCheck mesh = check_mesh(grid, inputs.topography, state, step_config.h_dry);
  if (mesh.coarse() && !options.quiet) {
    log << "warning: mean wet depth " << mesh.mean_wet_depth << " m is below the largest bed step "
        << mesh.max_face_step << " m between neighbouring cells; consider a finer mesh\n";
  }

  auto write_output = [&](int index) {
    const std::string path = (dir / snapshot_name(index)).string();
    write_snapshot(state, stepper.topography(), grid, path, state.time, step_config.h_dry, tag);
    summary.outputs.push_back(path);
  };
  write_output(0);

  const int outlet = config.outlet ? static_cast<int>(*config.outlet) : -1;
  double interval_volume = 0.0;
  double interval_start = 0.0;
  int output_index = 1;
  double last_dt = 0.0;

  while (state.time < config.t_end) {
    const double next_output = std::min(output_index * config.output_interval, config.t_end);
    const double remaining = next_output - state.time;
    StepResult step;
    try {
      step = stepper.heun_step(state, infiltration, remaining);
    } catch (const NumericalError& err) {
      throw NumericalError("step " + std::to_string(summary.steps + 1) + ": " + err.what());
    }
    ++summary.steps;
    summary.retries += step.retries;
    last_dt = step.dt;
    if (step.dt == remaining || state.time > next_output) {
      state.time = next_output;
    }
    balance.rain += step.volumes.rain;
    balance.infiltrated += step.volumes.infiltrated;
    for (int s = 0; s < 4; ++s) {
      balance.outflow[s] += step.volumes.outflow[s];
    }
    if (outlet >= 0) interval_volume += step.volumes.outflow[outlet];

    if (state.time >= next_output) {
      if (outlet >= 0) summary.hydrograph.push_back({state.time, interval_volume / (state.time - interval_start)});
      interval_volume = 0.0;
      interval_start = state.time;
      write_output(output_index);
      ++output_index;
      if (!options.quiet) {
        balance.final = total_water_volume(state, grid);
        const auto [lo, hi] = depth_range(state, grid);
        log << "t = " << state.time << "  dt = " << last_dt << "  steps = " << summary.steps << "  retries = " << summary.retries
            << "  h in [" << lo << ", " << hi << "]  residual = " << balance.residual() << "\n";
      }
    }
  }

  balance.final = total_water_volume(state, grid);
  summary.residual = balance.residual();
  summary.final_time = state.time;
  std::tie(summary.min_h, summary.max_h) = depth_range(state, grid);

  const std::string hydro_path = (dir / "hydrograph.txt").string();
  write_hydrograph(summary.hydrograph, hydro_path, tag);
  summary.outputs.push_back(hydro_path);
  const std::string balance_path = (dir / "mass_balance.txt").string();
  write_mass_balance(balance, balance_path, tag);
  summary.outputs.push_back(balance_path);

  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

RunSummary run_simulation(const SimulationConfig& config, const RunOptions& options) {
  return run_simulation(config, load_inputs(config), options);
}

}  // namespace swof
