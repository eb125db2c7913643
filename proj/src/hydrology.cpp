#include "swof/hydrology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swof/errors.hpp"

namespace swof {

void SoilParameters::validate() const {
  if (!(Ks >= 0.0) || !std::isfinite(Ks)) {
    throw ConfigError("Ks must be >= 0");
  }
  if (!(hf >= 0.0) || !std::isfinite(hf)) {
    throw ConfigError("hf must be >= 0");
  }
  if (!(dtheta > 0.0 && dtheta <= 1.0)) {
    throw ConfigError("dtheta must be in (0, 1]");
  }
}

void RainfallForcing::validate() const {
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    const auto& b = breakpoints[k];
    if (!std::isfinite(b.time) || !std::isfinite(b.intensity) || b.intensity < 0.0) {
      throw ConfigError("rain breakpoint " + std::to_string(k) + ": intensity must be finite and >= 0");
    }
    if (k > 0 && !(b.time > breakpoints[k - 1].time)) {
      throw ConfigError("rain breakpoint " + std::to_string(k) + ": times must strictly increase");
    }
  }
}

double rainfall_at(const RainfallForcing& forcing, double t) {
  const auto& bps = forcing.breakpoints;
  const auto after = std::upper_bound(bps.begin(), bps.end(), t,
                                      [](double time, const RainBreakpoint& b) { return time < b.time; });
  if (after == bps.begin()) {
    return 0.0;
  }
  return std::prev(after)->intensity;
}

double next_rain_change(const RainfallForcing& forcing, double t) {
  const auto& bps = forcing.breakpoints;
  const auto after = std::upper_bound(bps.begin(), bps.end(), t,
                                      [](double time, const RainBreakpoint& b) { return time < b.time; });
  return after == bps.end() ? std::numeric_limits<double>::infinity() : after->time;
}

double infiltration_capacity(const SoilParameters& soil, double V_inf, double h_sur) {
  if (soil.Ks != 0.0 && !(soil.dtheta > 0.0)) {
    throw ConfigError("dtheta must be > 0 when Ks > 0");
  }
  return green_ampt_capacity(soil, V_inf, h_sur);
}

}  // namespace swof
