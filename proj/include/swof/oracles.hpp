#pragma once

#include <functional>

#include "swof/friction.hpp"
#include "swof/grid.hpp"

namespace swof {

enum class SolutionKind { lake_at_rest, ritter_dry_dambreak, manufactured_steady };

/// One-dimensional exact solution h(x, t), u(x, t).
struct AnalyticSolution {
  SolutionKind kind = SolutionKind::lake_at_rest;
  std::function<double(double, double)> depth;
  std::function<double(double, double)> velocity;

  double h(double x, double t) const { return depth(x, t); }
  double u(double x, double t) const { return velocity(x, t); }
};

/// h = max(eta - z(x), 0), u = 0.
AnalyticSolution lake_at_rest(std::function<double(double)> z, double eta);

/// Still water at level eta over an arbitrary bed; cells above eta are dry.
FlowState lake_at_rest_state(const StructuredGrid& grid, const Topography& topo, double eta);

struct RitterPoint {
  double h;
  double u;
};

/// Dam break of depth h_left at x0 onto a dry frictionless bed. Requires h_left > 0, t > 0.
RitterPoint ritter_solution(double h_left, double x0, double g, double x, double t);

AnalyticSolution ritter(double h_left, double x0, double g);

/// A smooth positive depth and its derivative.
struct DepthProfile {
  std::function<double(double)> h;
  std::function<double(double)> dh;
};

/**
 * @brief Steady flow of discharge q0 with a prescribed depth profile.
 *
 * The bed slope z' = (q0^2 / (g h^3) - 1) h' - S_f makes (h, q0) an exact
 * steady state; z is its integral from x_begin, where z = 0.
 */
struct ManufacturedSteady {
  AnalyticSolution solution;
  std::function<double(double)> slope;
  double x_begin = 0.0;

  /// Bed elevation by composite 5-point Gauss-Legendre quadrature of slope.
  double z(double x) const;
};

/**
 * Builds the manufactured case on [x_begin, x_end]. Throws ConfigError if the
 * flow is not subcritical (q0^2 / (g h^3) >= 1) or h <= 0 anywhere on a fine
 * sampling of the interval.
 */
ManufacturedSteady manufactured_steady(double q0, DepthProfile profile, FrictionLaw friction, double g,
                                       double x_begin, double x_end);

/// Friction slope of a uniform discharge q0 at depth h.
double friction_slope(const FrictionLaw& friction, double q0, double h, double g);

struct ErrorNorms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

/// Cell-area weighted L1 and L2 and the maximum of |numerical - exact| over interior cells.
ErrorNorms error_norms(const Field& numerical, const Field& exact, const StructuredGrid& grid);

/// log2(coarse / fine), the observed order for a halved mesh size.
double observed_order(double coarse, double fine);

}  // namespace swof
