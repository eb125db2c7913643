#pragma once

#include <cmath>
#include <string_view>

namespace swof {

enum class FrictionKind { none, darcy_weisbach, manning };

/// Constant-coefficient friction law: f for Darcy-Weisbach, n [s m^-1/3] for Manning.
struct FrictionLaw {
  FrictionKind kind = FrictionKind::none;
  double coefficient = 0.0;
};

FrictionKind parse_friction_kind(std::string_view name);
std::string_view to_string(FrictionKind kind);

/**
 * Semi-implicit friction divisor 1 + dt K |q_old| / (h_old h_new).
 *
 * K = f/8 (Darcy-Weisbach) or g n^2 / h_new^(1/3) (Manning). The divisor uses
 * the stage-input discharge magnitude, the numerator the convective one.
 * It is 1 without friction, for a zero coefficient, a still or a dry input cell.
 */
template <FrictionKind Kind>
inline double friction_divisor_of(double h_new, double q_old_norm, double h_old, double coefficient, double dt,
                                  double g, double h_dry) {
  if constexpr (Kind == FrictionKind::none) {
    return 1.0;
  } else {
    const double base = dt * q_old_norm / (h_old * h_new);
    double divisor;
    if constexpr (Kind == FrictionKind::darcy_weisbach) {
      divisor = 1.0 + base * (coefficient / 8.0);
    } else {
      divisor = 1.0 + base * g * coefficient * coefficient / std::cbrt(h_new);
    }
    const bool active = coefficient != 0.0 && h_old >= h_dry && q_old_norm != 0.0;
    return active ? divisor : 1.0;
  }
}

inline double friction_divisor(double h_new, double q_old_norm, double h_old, const FrictionLaw& law,
                               double dt, double g, double h_dry) {
  switch (law.kind) {
    case FrictionKind::darcy_weisbach:
      return friction_divisor_of<FrictionKind::darcy_weisbach>(h_new, q_old_norm, h_old, law.coefficient, dt, g,
                                                               h_dry);
    case FrictionKind::manning:
      return friction_divisor_of<FrictionKind::manning>(h_new, q_old_norm, h_old, law.coefficient, dt, g, h_dry);
    case FrictionKind::none:
      break;
  }
  return 1.0;
}

inline double apply_friction_semi_implicit(double h_new, double q_star, double q_old, double h_old,
                                           const FrictionLaw& law, double dt, double g, double h_dry) {
  if (h_new < h_dry) {
    return 0.0;
  }
  return q_star / friction_divisor(h_new, std::abs(q_old), h_old, law, dt, g, h_dry);
}

struct Discharge2 {
  double qx;
  double qy;
};

/// Both components share one divisor built from |q_old| = sqrt(qx^2 + qy^2).
inline Discharge2 apply_friction_2d(double h_new, double qx_star, double qy_star, double qx_old,
                                    double qy_old, double h_old, const FrictionLaw& law, double dt,
                                    double g, double h_dry) {
  if (h_new < h_dry) {
    return {0.0, 0.0};
  }
  const double divisor =
      friction_divisor(h_new, std::sqrt(qx_old * qx_old + qy_old * qy_old), h_old, law, dt, g, h_dry);
  return {qx_star / divisor, qy_star / divisor};
}

}  // namespace swof
