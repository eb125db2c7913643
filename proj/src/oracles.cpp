#include "swof/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "swof/errors.hpp"

namespace swof {

AnalyticSolution lake_at_rest(std::function<double(double)> z, double eta) {
  AnalyticSolution s;
  s.kind = SolutionKind::lake_at_rest;
  s.depth = [z = std::move(z), eta](double x, double) { return std::max(eta - z(x), 0.0); };
  s.velocity = [](double, double) { return 0.0; };
  return s;
}

FlowState lake_at_rest_state(const StructuredGrid& grid, const Topography& topo, double eta) {
  FlowState state(grid);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      state.h(i, j) = std::max(eta - topo.z(i, j), 0.0);
    }
  }
  return state;
}

RitterPoint ritter_solution(double h_left, double x0, double g, double x, double t) {
  if (!(h_left > 0.0) || !(t > 0.0)) {
    throw ConfigError("ritter_solution needs h_left > 0 and t > 0");
  }
  const double c0 = std::sqrt(g * h_left);
  const double xi = (x - x0) / t;
  if (xi <= -c0) {
    return {h_left, 0.0};
  }
  if (xi >= 2.0 * c0) {
    return {0.0, 0.0};
  }
  const double c = 2.0 * c0 - xi;
  return {c * c / (9.0 * g), 2.0 / 3.0 * (xi + c0)};
}

AnalyticSolution ritter(double h_left, double x0, double g) {
  AnalyticSolution s;
  s.kind = SolutionKind::ritter_dry_dambreak;
  s.depth = [=](double x, double t) { return ritter_solution(h_left, x0, g, x, t).h; };
  s.velocity = [=](double x, double t) { return ritter_solution(h_left, x0, g, x, t).u; };
  return s;
}

double friction_slope(const FrictionLaw& friction, double q0, double h, double g) {
  switch (friction.kind) {
    case FrictionKind::darcy_weisbach:
      return friction.coefficient * q0 * std::abs(q0) / (8.0 * g * h * h * h);
    case FrictionKind::manning:
      return friction.coefficient * friction.coefficient * q0 * std::abs(q0) / std::pow(h, 10.0 / 3.0);
    case FrictionKind::none:
      break;
  }
  return 0.0;
}

double ManufacturedSteady::z(double x) const {
  static constexpr std::array<double, 5> nodes{0.0, -0.5384693101056831, 0.5384693101056831,
                                               -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> weights{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                                 0.2369268850561891, 0.2369268850561891};
  const double length = x - x_begin;
  if (length == 0.0) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(length) / 0.02)));
  const double w = length / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = x_begin + (p + 0.5) * w;
    double panel = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      panel += weights[k] * slope(mid + 0.5 * w * nodes[k]);
    }
    sum += 0.5 * w * panel;
  }
  return sum;
}

ManufacturedSteady manufactured_steady(double q0, DepthProfile profile, FrictionLaw friction, double g,
                                       double x_begin, double x_end) {
  constexpr int kSamples = 10000;
  for (int k = 0; k <= kSamples; ++k) {
    const double x = x_begin + (x_end - x_begin) * k / kSamples;
    const double h = profile.h(x);
    if (!(h > 0.0)) {
      throw ConfigError("manufactured depth must be positive (x = " + std::to_string(x) + ")");
    }
    if (q0 * q0 / (g * h * h * h) >= 1.0) {
      throw ConfigError("manufactured flow is not subcritical at x = " + std::to_string(x));
    }
  }
  ManufacturedSteady m;
  m.x_begin = x_begin;
  m.slope = [=](double x) {
    const double h = profile.h(x);
    return (q0 * q0 / (g * h * h * h) - 1.0) * profile.dh(x) - friction_slope(friction, q0, h, g);
  };
  m.solution.kind = SolutionKind::manufactured_steady;
  m.solution.depth = [h = profile.h](double x, double) { return h(x); };
  m.solution.velocity = [h = profile.h, q0](double x, double) { return q0 / h(x); };
  return m;
}

ErrorNorms error_norms(const Field& numerical, const Field& exact, const StructuredGrid& grid) {
  if (numerical.nx() != exact.nx() || numerical.ny() != exact.ny() || numerical.nx() != grid.nx ||
      numerical.ny() != grid.ny) {
    throw ConfigError("error_norms: field shapes differ");
  }
  ErrorNorms n;
  double sum_sq = 0.0;
  for (int j = 0; j < grid.ny; ++j) {
    double row_abs = 0.0, row_sq = 0.0;
    for (int i = 0; i < grid.nx; ++i) {
      const double e = std::abs(numerical(i, j) - exact(i, j));
      row_abs += e;
      row_sq += e * e;
      n.linf = std::max(n.linf, e);
    }
    n.l1 += row_abs;
    sum_sq += row_sq;
  }
  n.l1 *= grid.cell_area();
  n.l2 = std::sqrt(sum_sq * grid.cell_area());
  return n;
}

double observed_order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace swof
