#include "swof/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "swof/io.hpp"

namespace swof::verify {

bool Report::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

void print(std::ostream& out, const Report& report) {
  for (const auto& c : report.checks) {
    out << report.suite << ": " << c.name << " = " << format_double(c.measured) << (c.at_most ? " <= " : " >= ")
        << format_double(c.threshold) << "  " << (c.pass() ? "PASS" : "FAIL") << "\n";
  }
  for (const auto& n : report.notes) {
    out << report.suite << ": " << n << "\n";
  }
  out << report.suite << ": " << (report.pass() ? "PASS" : "FAIL") << "\n";
}

Topography lake_bed(const StructuredGrid& grid, LakeBed bed) {
  Topography topo(grid);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.cell_x(i), y = grid.cell_y(j);
      if (bed == LakeBed::smooth_bump) {
        const double r2 = (x - 5.0) * (x - 5.0) + (y - 5.0) * (y - 5.0);
        topo.z(i, j) = 1.2 * std::exp(-r2 / 2.0);
      } else {
        double z = x < 5.0 ? 0.0 : 0.6;
        if (x > 6.5 && x < 8.0 && y > 3.0 && y < 6.0) z = 1.3;
        topo.z(i, j) = z;
      }
    }
  }
  return topo;
}

LakeResult run_lake(const LakeCase& c) {
  const StructuredGrid grid{c.n, c.n, 10.0 / c.n, 10.0 / c.n, 0.0, 0.0};
  const Topography topo = lake_bed(grid, c.bed);
  StepConfig config;
  config.threads = c.threads;
  Stepper stepper(grid, topo, config);
  FlowState state = lake_at_rest_state(grid, topo, c.eta);
  InfiltrationState infiltration(grid);
  for (int s = 0; s < c.steps; ++s) {
    stepper.heun_step(state, infiltration, std::numeric_limits<double>::infinity());
  }
  LakeResult r;
  r.final_time = state.time;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double h = state.h(i, j);
      if (h >= config.h_dry) {
        ++r.wet_cells;
        r.max_surface_deviation = std::max(r.max_surface_deviation, std::abs(h + topo.z(i, j) - c.eta));
      } else {
        ++r.dry_cells;
      }
      r.max_discharge = std::max({r.max_discharge, std::abs(state.qx(i, j)), std::abs(state.qy(i, j))});
    }
  }
  return r;
}

Report lake_suite() {
  Report report{"lake", {}, {}};
  for (const auto bed : {LakeBed::smooth_bump, LakeBed::step}) {
    const std::string label = bed == LakeBed::smooth_bump ? "smooth bump" : "step";
    const LakeResult r = run_lake({bed});
    report.checks.push_back({label + " max |h + z - eta|", r.max_surface_deviation, kLakeTolerance});
    report.checks.push_back({label + " max |q|", r.max_discharge, kLakeTolerance});
    report.notes.push_back(label + ": " + std::to_string(r.wet_cells) + " wet and " + std::to_string(r.dry_cells) +
                           " dry cells after 1000 steps, t = " + format_double(r.final_time));
  }
  return report;
}

RitterResult run_ritter(const RitterCase& c) {
  const StructuredGrid grid{c.n, 1, c.length / c.n, c.length / c.n, 0.0, 0.0};
  const Topography topo(grid);
  StepConfig config;
  config.cfl = CflSettings::defaults_for(c.order);
  Stepper stepper(grid, topo, config);
  FlowState state(grid);
  for (int i = 0; i < grid.nx; ++i) {
    state.h(i, 0) = grid.cell_x(i) < c.x0 ? c.h_left : 0.0;
  }
  InfiltrationState infiltration(grid);
  RitterResult r;
  r.min_h = c.h_left;
  while (state.time < c.t_end) {
    const double remaining = c.t_end - state.time;
    const StepResult step = stepper.heun_step(state, infiltration, remaining);
    if (step.dt == remaining) state.time = c.t_end;
    ++r.steps;
    r.retries += step.retries;
    for (int i = 0; i < grid.nx; ++i) {
      const double h = state.h(i, 0);
      if (!std::isfinite(h) || !std::isfinite(state.qx(i, 0))) r.finite = false;
      r.min_h = std::min(r.min_h, h);
    }
  }
  Field exact(grid.nx, 1);
  for (int i = 0; i < grid.nx; ++i) {
    exact(i, 0) = ritter_solution(c.h_left, c.x0, config.constants.g, grid.cell_x(i), c.t_end).h;
  }
  r.h_error = error_norms(state.h, exact, grid);
  return r;
}

Report ritter_suite() {
  Report report{"ritter", {}, {}};
  std::vector<double> l1;
  double min_h = std::numeric_limits<double>::infinity();
  bool finite = true;
  long retries = 0;
  for (const int n : {200, 400, 800}) {
    const RitterResult r = run_ritter({n});
    l1.push_back(r.h_error.l1);
    min_h = std::min(min_h, r.min_h);
    finite = finite && r.finite;
    retries += r.retries;
    report.notes.push_back("N = " + std::to_string(n) + ": L1(h) = " + format_double(r.h_error.l1) + ", " +
                           std::to_string(r.steps) + " steps");
  }
  report.checks.push_back({"min h over all steps", min_h, kNegativeDepthTolerance, false});
  report.checks.push_back({"non-finite values", finite ? 0.0 : 1.0, 0.0});
  report.checks.push_back({"retried steps", static_cast<double>(retries), 0.0});
  for (std::size_t k = 1; k < l1.size(); ++k) {
    const std::string pair = std::to_string(200 << (k - 1)) + "->" + std::to_string(200 << k);
    report.checks.push_back({"L1 rate " + pair, observed_order(l1[k - 1], l1[k]), kRitterMinRate, false});
  }
  return report;
}

DepthProfile manufactured_profile() {
  return {[](double x) { return 1.0 + 0.1 * std::exp(-(x - 5.0) * (x - 5.0)); },
          [](double x) { return -0.2 * (x - 5.0) * std::exp(-(x - 5.0) * (x - 5.0)); }};
}

double manufactured_residual(const ManufacturedCase& c) {
  const double length = 10.0;
  const StructuredGrid grid{c.n, 1, length / c.n, length / c.n, 0.0, 0.0};
  StepConfig config;
  config.cfl = CflSettings::defaults_for(c.order);
  config.friction = {FrictionKind::darcy_weisbach, c.friction_coefficient};
  config.boundaries[Side::left] = BoundaryKind::neumann;
  config.boundaries[Side::right] = BoundaryKind::neumann;
  const ManufacturedSteady m =
      manufactured_steady(c.q0, manufactured_profile(), config.friction, config.constants.g, 0.0, length);

  Topography topo(grid);
  FlowState state(grid);
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.cell_x(i);
    topo.z(i, 0) = m.z(x);
    state.h(i, 0) = m.solution.h(x, 0.0);
    state.qx(i, 0) = c.q0;
  }
  Stepper stepper(grid, topo, config);
  const double dt = stepper.compute_dt(state, std::numeric_limits<double>::infinity());
  const StageResult stage = stepper.euler_stage(state, InfiltrationState(grid), dt);

  double sum = 0.0;
  for (int i = c.skip; i < grid.nx - c.skip; ++i) {
    sum += std::abs(stage.state.h(i, 0) - state.h(i, 0)) + std::abs(stage.state.qx(i, 0) - state.qx(i, 0));
  }
  return sum * grid.dx / dt;
}

Report convergence_suite() {
  Report report{"convergence", {}, {}};
  for (const int order : {2, 1}) {
    std::vector<double> res;
    for (const int n : {100, 200, 400}) {
      ManufacturedCase c;
      c.n = n;
      c.order = order;
      res.push_back(manufactured_residual(c));
      report.notes.push_back("order " + std::to_string(order) + ", N = " + std::to_string(n) +
                             ": L1 residual = " + format_double(res.back()));
    }
    const double threshold = order == 2 ? kSecondOrderMinRate : kFirstOrderMinRate;
    for (std::size_t k = 1; k < res.size(); ++k) {
      const std::string pair = std::to_string(100 << (k - 1)) + "->" + std::to_string(100 << k);
      report.checks.push_back({"order " + std::to_string(order) + " rate " + pair, observed_order(res[k - 1], res[k]),
                               threshold, false});
    }
  }
  return report;
}

}  // namespace swof::verify
