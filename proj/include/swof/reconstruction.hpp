#pragma once

// Piecewise-linear MUSCL reconstruction with the minmod limiter, the
// discharge-conserving velocity correction, and the hydrostatic
// reconstruction with its interface and centred topography sources.
//
// Face naming follows the cell: "left" is the face at i - 1/2, "right" the
// face at i + 1/2 (bottom/top in y).

#include <algorithm>
#include <cmath>

namespace swof {

/// The argument of smaller magnitude when both share a sign, else 0. Branch-free.
inline double minmod(double a, double b) {
  const double m = std::abs(a) < std::abs(b) ? a : b;
  return a * b > 0.0 ? m : 0.0;
}

struct ScalarFaces {
  double left;   // s_{i-1/2+}
  double right;  // s_{i+1/2-}
  double slope;  // limited Ds_i
};

inline ScalarFaces muscl_scalar(double s_left, double s_center, double s_right, double dx) {
  // minmod commutes with the positive factor 1/dx, so faces need no division.
  const double half = 0.5 * minmod(s_center - s_left, s_right - s_center);
  return {s_center - half, s_center + half, 2.0 * half / dx};
}

struct VelocityFaces {
  double left;
  double right;
};

/**
 * Velocity faces corrected so that h_left u_left + h_right u_right = 2 h u.
 *
 * Each face borrows the depth of the opposite face:
 * u_left = u - (h_right / h) (dx/2) Du, u_right = u + (h_left / h) (dx/2) Du.
 * A cell below h_dry is treated as first order.
 */
inline VelocityFaces muscl_velocity(double u_center, double du, double h_center, double h_face_left,
                                    double h_face_right, double dx, double h_dry) {
  if (h_center < h_dry) {
    return {u_center, u_center};
  }
  const double half = 0.5 * dx * du;
  return {u_center - (h_face_right / h_center) * half, u_center + (h_face_left / h_center) * half};
}

struct HydrostaticDepths {
  double left;   // h_{i+1/2L}
  double right;  // h_{i+1/2R}
};

/// Depths on both sides of one interface, clipped against the higher bed.
inline HydrostaticDepths hydrostatic_reconstruct(double h_left, double z_left, double h_right,
                                                 double z_right) {
  const double z_max = std::max(z_left, z_right);
  return {std::max(h_left + z_left - z_max, 0.0), std::max(h_right + z_right - z_max, 0.0)};
}

/// Momentum correction (g/2)(h_face^2 - h_reconstructed^2) added to the face flux.
inline double interface_source(double h_face, double h_reconstructed, double g) {
  return 0.5 * g * (h_face * h_face - h_reconstructed * h_reconstructed);
}

/// Cell-centred topography source -g (h_left + h_right)/2 (z_right - z_left).
inline double centered_source(double h_face_left, double h_face_right, double z_face_left,
                              double z_face_right, double g) {
  return -g * 0.5 * (h_face_left + h_face_right) * (z_face_right - z_face_left);
}

/// Reconstructed face values of one cell along one direction.
struct CellReconstruction {
  double h_left, h_right;
  double u_left, u_right;  // normal velocity
  double v_left, v_right;  // transverse velocity
  double z_left, z_right;
};

/// Neighbourhood of one cell along one direction: index 0 = previous, 1 = self, 2 = next.
struct Stencil {
  double h[3];
  double eta[3];  // h + z
  double u[3];
  double v[3];
  double z_center;
};

/**
 * Reconstruction of one cell.
 *
 * MUSCL acts on h, h + z and the velocities; bed faces are deduced as
 * (h + z)_face - h_face. Dry cells (h < h_dry) and first-order runs keep
 * the cell values on both faces. Limited differences are used in place of
 * slopes times dx/2, which keeps the kernel free of divisions by dx.
 */
inline CellReconstruction reconstruct_cell(const Stencil& s, double h_dry, bool second_order) {
  const double h = s.h[1];
  const bool linear = second_order && h >= h_dry;
  const double hh = linear ? 0.5 * minmod(h - s.h[0], s.h[2] - h) : 0.0;
  const double he = 0.5 * minmod(s.eta[1] - s.eta[0], s.eta[2] - s.eta[1]);
  const double hu = linear ? 0.5 * minmod(s.u[1] - s.u[0], s.u[2] - s.u[1]) : 0.0;
  const double hv = linear ? 0.5 * minmod(s.v[1] - s.v[0], s.v[2] - s.v[1]) : 0.0;
  const double h_left = h - hh, h_right = h + hh;
  const double inv_h = linear ? 1.0 / h : 0.0;
  const double wl = h_right * inv_h, wr = h_left * inv_h;
  return {h_left,
          h_right,
          s.u[1] - wl * hu,
          s.u[1] + wr * hu,
          s.v[1] - wl * hv,
          s.v[1] + wr * hv,
          linear ? (s.eta[1] - he) - h_left : s.z_center,
          linear ? (s.eta[1] + he) - h_right : s.z_center};
}

}  // namespace swof
