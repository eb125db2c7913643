#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "swof/grid.hpp"

namespace swof {

/// Green-Ampt soil: Ks [m/s], wetting-front head hf [m], dtheta = theta_s - theta_i.
struct SoilParameters {
  double Ks = 0.0;
  double hf = 0.0;
  double dtheta = 1.0;

  /// Throws ConfigError on Ks < 0, hf < 0 or dtheta outside (0, 1].
  void validate() const;
};

/// Cumulative infiltrated depth per cell [m].
struct InfiltrationState {
  Field V_inf;

  InfiltrationState() = default;
  explicit InfiltrationState(const StructuredGrid& grid) : V_inf(grid.nx, grid.ny) {}
};

struct RainBreakpoint {
  double time;       // [s]
  double intensity;  // [m/s]
};

/// Spatially uniform rain, piecewise constant from each breakpoint to the next.
struct RainfallForcing {
  std::vector<RainBreakpoint> breakpoints;

  /// Throws ConfigError unless times strictly increase and intensities are >= 0.
  void validate() const;
  bool empty() const { return breakpoints.empty(); }
};

inline constexpr double kMillimetresPerHour = 1e-3 / 3600.0;

double rainfall_at(const RainfallForcing& forcing, double t);

/// Time of the first breakpoint after t; +inf if there is none.
double next_rain_change(const RainfallForcing& forcing, double t);

/// Returned by infiltration_capacity while the wetting front is still at the surface.
inline constexpr double kUnboundedCapacity = std::numeric_limits<double>::infinity();

/**
 * Green-Ampt capacity Ks (1 + (hf - h_sur) / Z_f) with Z_f = V_inf / dtheta.
 *
 * Clamped below at 0; unbounded when V_inf == 0 and 0 when Ks == 0. Assumes
 * validated soil parameters; branch-free.
 */
inline double green_ampt_capacity(const SoilParameters& soil, double V_inf, double h_sur) {
  const double front_depth = V_inf / soil.dtheta;
  const double capacity = std::max(0.0, soil.Ks * (1.0 + (soil.hf - h_sur) / front_depth));
  return soil.Ks == 0.0 ? 0.0 : (V_inf <= 0.0 ? kUnboundedCapacity : capacity);
}

/// As green_ampt_capacity; throws ConfigError if dtheta <= 0 on a permeable soil.
double infiltration_capacity(const SoilParameters& soil, double V_inf, double h_sur);

struct InfiltrationStep {
  double rate;   // I [m/s]
  double depth;  // dt * I, removed from the surface [m]
  double V_inf;  // updated cumulative depth [m]
};

/// I = min(h_sur, dt I_C) / dt for a known capacity.
inline InfiltrationStep infiltrate_with_capacity(double capacity, double V_inf, double h_sur, double dt) {
  const double depth = capacity == kUnboundedCapacity ? h_sur : std::min(h_sur, dt * capacity);
  return {depth / dt, depth, V_inf + depth};
}

inline InfiltrationStep infiltrate(const SoilParameters& soil, double V_inf, double h_sur, double dt) {
  if (h_sur <= 0.0) {
    return {0.0, 0.0, V_inf};
  }
  return infiltrate_with_capacity(infiltration_capacity(soil, V_inf, h_sur), V_inf, h_sur, dt);
}

}  // namespace swof
