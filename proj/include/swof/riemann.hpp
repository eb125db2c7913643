#pragma once

#include <algorithm>
#include <cmath>

#include "swof/grid.hpp"

namespace swof {

struct WaveSpeeds {
  double c1;  // slowest
  double c2;  // fastest
};

/// Min/max of u -+ sqrt(g h) over both sides of the interface.
inline WaveSpeeds wave_speeds(double h_left, double u_left, double h_right, double u_right, double g) {
  const double c_left = std::sqrt(g * h_left);
  const double c_right = std::sqrt(g * h_right);
  return {std::min(u_left - c_left, u_right - c_right), std::max(u_left + c_left, u_right + c_right)};
}

struct InterfaceFlux {
  double mass = 0.0;      // f_h [m^2/s]
  double momentum = 0.0;  // f_q [m^3/s^2]
  double max_speed = 0.0;
};

/// Physical flux (hu, hu^2 + g h^2 / 2).
inline InterfaceFlux physical_flux(double h, double u, double g) {
  const double q = h * u;
  return {q, q * u + 0.5 * g * h * h, std::abs(u) + std::sqrt(g * h)};
}

/**
 * HLL flux for the homogeneous 1D system, normal to the face.
 *
 * Identical states return F(U) without going through the blended branch, so
 * consistency holds to the bit. Two dry sides give the zero flux.
 */
inline InterfaceFlux hll_flux(double h_left, double u_left, double h_right, double u_right, double g,
                              double h_dry = kDefaultDryDepth) {
  // Every branch is evaluated and the result selected, so loops over faces vectorize.
  const auto [c1, c2] = wave_speeds(h_left, u_left, h_right, u_right, g);
  const double max_speed = std::max(std::abs(c1), std::abs(c2));
  const double q_left = h_left * u_left;
  const double q_right = h_right * u_right;
  const double fq_left = q_left * u_left + 0.5 * g * h_left * h_left;
  const double fq_right = q_right * u_right + 0.5 * g * h_right * h_right;
  const double inv = 1.0 / (c2 - c1);
  const double c1c2 = c1 * c2;
  double mass = (c2 * q_left - c1 * q_right) * inv + c1c2 * inv * (h_right - h_left);
  double momentum = (c2 * fq_left - c1 * fq_right) * inv + c1c2 * inv * (q_right - q_left);
  const bool left_wins = 0.0 < c1 || (h_left == h_right && u_left == u_right);
  mass = left_wins ? q_left : (c2 < 0.0 ? q_right : mass);
  momentum = left_wins ? fq_left : (c2 < 0.0 ? fq_right : momentum);
  const bool dry = h_left < h_dry && h_right < h_dry;
  return {dry ? 0.0 : mass, dry ? 0.0 : momentum, dry ? 0.0 : max_speed};
}

struct DirectionalFlux {
  double mass;
  double normal;      // normal momentum
  double transverse;  // transverse momentum
  double max_speed;
};

/// HLL on the normal components; transverse momentum upwinded by the sign of the mass flux.
inline DirectionalFlux transverse_flux(double h_left, double un_left, double ut_left, double h_right,
                                       double un_right, double ut_right, double g,
                                       double h_dry = kDefaultDryDepth) {
  const InterfaceFlux f = hll_flux(h_left, un_left, h_right, un_right, g, h_dry);
  const double ft = f.mass == 0.0 ? 0.0 : f.mass * (f.mass > 0.0 ? ut_left : ut_right);
  return {f.mass, f.momentum, ft, f.max_speed};
}

}  // namespace swof
