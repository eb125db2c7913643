#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "swof/errors.hpp"
#include "swof/oracles.hpp"
#include "swof/stepper.hpp"

using namespace swof;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Topography bump_bed(const StructuredGrid& grid) {
  Topography topo(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.cell_x(i) - 1.0, y = grid.cell_y(j) - 1.0;
      topo.z(i, j) = 1.2 * std::exp(-4.0 * (x * x + y * y)) + (grid.cell_x(i) > 1.5 ? 0.3 : 0.0);
    }
  return topo;
}

double min_depth(const FlowState& s) {
  double m = kInf;
  for (int j = 0; j < s.h.ny(); ++j)
    for (int i = 0; i < s.h.nx(); ++i) m = std::min(m, s.h(i, j));
  return m;
}

}  // namespace

TEST_CASE("boundary kind and side names") {
  CHECK(parse_boundary_kind("wall") == BoundaryKind::wall);
  CHECK(parse_boundary_kind("neumann") == BoundaryKind::neumann);
  CHECK(parse_boundary_kind("periodic") == BoundaryKind::periodic);
  CHECK_THROWS_AS(parse_boundary_kind("open"), ConfigError);
  CHECK(parse_side("top") == Side::top);
  CHECK_THROWS_AS(parse_side("north"), ConfigError);
  CHECK(to_string(Side::bottom) == "bottom");
  CHECK(to_string(BoundaryKind::neumann) == "neumann");
}

TEST_CASE("periodic sides must be paired") {
  BoundaryConditions bc;
  bc[Side::left] = BoundaryKind::periodic;
  CHECK_THROWS_AS(bc.validate(), ConfigError);
  bc[Side::right] = BoundaryKind::periodic;
  CHECK_NOTHROW(bc.validate());
  bc[Side::top] = BoundaryKind::periodic;
  CHECK_THROWS_AS(bc.validate(), ConfigError);
}

TEST_CASE("CFL defaults and validation") {
  CHECK(CflSettings::defaults_for(2).n_cfl == 0.5);
  CHECK(CflSettings::defaults_for(1).n_cfl == 1.0);
  CflSettings s;
  s.n_cfl = 1.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.n_cfl = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = CflSettings{};
  s.max_retries = -1;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("ghost cells") {
  const StructuredGrid grid{3, 2, 1.0, 1.0, 0.0, 0.0};
  FlowState state(grid);
  Topography topo(grid);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 3; ++i) {
      state.h(i, j) = 1.0 + i + 10.0 * j;
      state.qx(i, j) = 2.0;
      state.qy(i, j) = 3.0;
      topo.z(i, j) = 0.1 * i;
    }
  BoundaryConditions bc;
  bc[Side::left] = BoundaryKind::wall;
  bc[Side::right] = BoundaryKind::neumann;
  bc[Side::bottom] = bc[Side::top] = BoundaryKind::periodic;
  fill_ghosts(state, topo, bc);

  // Wall: mirror h and z, negate the normal discharge, copy the transverse one.
  CHECK(state.h(-1, 0) == 1.0);
  CHECK(state.qx(-1, 0) == -2.0);
  CHECK(state.qy(-1, 0) == 3.0);
  CHECK(topo.z(-1, 0) == 0.0);
  // Neumann: copy.
  CHECK(state.h(3, 1) == 13.0);
  CHECK(state.qx(3, 1) == 2.0);
  CHECK(state.qy(3, 1) == 3.0);
  CHECK(topo.z(3, 1) == topo.z(2, 1));
  // Periodic: wrap.
  CHECK(state.h(1, -1) == state.h(1, 1));
  CHECK(state.h(1, 2) == state.h(1, 0));
  CHECK(state.qy(1, -1) == 3.0);
}

TEST_CASE("periodic ghosts on a three-cell row") {
  const StructuredGrid grid{3, 1, 1.0, 1.0, 0.0, 0.0};
  FlowState state(grid);
  Topography topo(grid);
  state.h(0, 0) = 1.0;
  state.h(1, 0) = 2.0;
  state.h(2, 0) = 3.0;
  BoundaryConditions bc;
  bc[Side::left] = bc[Side::right] = BoundaryKind::periodic;
  fill_ghosts(state, topo, bc);
  CHECK(state.h(-1, 0) == 3.0);
  CHECK(state.h(3, 0) == 1.0);
}

TEST_CASE("compute_dt scales with n_cfl and is clipped") {
  const StructuredGrid grid{10, 1, 0.1, 0.1, 0.0, 0.0};
  FlowState state(grid);
  state.h.fill_interior(1.0);
  state.qx.fill_interior(1.0);
  BoundaryConditions bc;
  bc[Side::left] = bc[Side::right] = BoundaryKind::neumann;
  const Topography topo(grid);
  CflSettings half = CflSettings::defaults_for(2);
  CflSettings full = half;
  full.n_cfl = 1.0;
  const double a = compute_dt(state, topo, grid, half, 9.81, 1e-12, kInf, bc);
  const double b = compute_dt(state, topo, grid, full, 9.81, 1e-12, kInf, bc);
  CHECK(b == 2.0 * a);
  CHECK(compute_dt(state, topo, grid, half, 9.81, 1e-12, 1e-6, bc) == 1e-6);
  CflSettings capped = half;
  capped.dt_max = 1e-3;
  CHECK(compute_dt(state, topo, grid, capped, 9.81, 1e-12, kInf, bc) == 1e-3);
}

TEST_CASE("2D compute_dt sums the directional Courant numbers") {
  const StructuredGrid grid{8, 8, 0.1, 0.2, 0.0, 0.0};
  FlowState state(grid);
  state.h.fill_interior(1.0);
  state.qx.fill_interior(1.0);
  state.qy.fill_interior(-2.0);
  BoundaryConditions bc;
  for (auto& k : bc.kind) k = BoundaryKind::neumann;
  const double c = std::sqrt(9.81);
  const double expected = 0.5 / ((1.0 + c) / 0.1 + (2.0 + c) / 0.2);
  const double dt = compute_dt(state, Topography(grid), grid, CflSettings::defaults_for(2), 9.81, 1e-12, kInf, bc);
  CHECK(dt == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("all-dry domain") {
  const StructuredGrid grid{5, 4, 0.1, 0.1, 0.0, 0.0};
  const Topography topo(grid);
  FlowState state(grid);
  StepConfig config;
  {
    Stepper stepper(grid, topo, config);
    CHECK(stepper.compute_dt(state, 600.0) == 600.0);
  }
  // Rain: the step ends at the next breakpoint and deposits a depth within the CFL bound.
  config.rain = {{{0.0, 1e-5}, {30.0, 0.0}}};
  Stepper stepper(grid, topo, config);
  const double dt = stepper.compute_dt(state, 600.0);
  CHECK(dt <= 30.0);
  CHECK(dt > 0.0);
  CHECK(dt * std::sqrt(9.81 * 1e-5 * dt) * (1.0 / 0.1 + 1.0 / 0.1) <= 0.5 * (1.0 + 1e-12));
  state.time = 40.0;
  CHECK(stepper.compute_dt(state, 600.0) == 600.0);
}

TEST_CASE("lake at rest is a fixed point of one stage and of Heun steps") {
  const StructuredGrid grid{24, 20, 0.1, 0.1, 0.0, 0.0};
  const Topography topo = bump_bed(grid);
  const FlowState lake = lake_at_rest_state(grid, topo, 1.0);
  StepConfig config;
  Stepper stepper(grid, topo, config);

  const double dt = stepper.compute_dt(lake, kInf);
  const StageResult stage = stepper.euler_stage(lake, InfiltrationState(grid), dt);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (lake.h(i, j) >= config.h_dry) {
        CHECK(stage.state.h(i, j) + topo.z(i, j) == lake.h(i, j) + topo.z(i, j));
      } else {
        CHECK(stage.state.h(i, j) == 0.0);
      }
      CHECK(std::abs(stage.state.qx(i, j)) <= 1e-13);
      CHECK(std::abs(stage.state.qy(i, j)) <= 1e-13);
    }

  FlowState state = lake;
  InfiltrationState infiltration(grid);
  for (int n = 0; n < 50; ++n) stepper.heun_step(state, infiltration, kInf);
  double dev = 0.0, q = 0.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (state.h(i, j) >= config.h_dry) dev = std::max(dev, std::abs(state.h(i, j) + topo.z(i, j) - 1.0));
      q = std::max({q, std::abs(state.qx(i, j)), std::abs(state.qy(i, j))});
    }
  CHECK(dev <= 1e-12);
  CHECK(q <= 1e-12);
}

TEST_CASE("uniform still water under uniform rain rises by dt R") {
  const StructuredGrid grid{6, 5, 0.2, 0.2, 0.0, 0.0};
  FlowState state(grid);
  state.h.fill_interior(0.5);
  StepConfig config;
  config.rain = {{{0.0, 2e-5}}};
  Stepper stepper(grid, Topography(grid), config);
  const double dt = 0.01;
  const StageResult stage = stepper.euler_stage(state, InfiltrationState(grid), dt);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      CHECK(stage.state.h(i, j) == 0.5 + dt * 2e-5);
      CHECK(stage.state.qx(i, j) == 0.0);
    }
  CHECK(stage.volumes.rain == doctest::Approx(dt * 2e-5 * 30 * 0.04).epsilon(1e-14));

  InfiltrationState infiltration(grid);
  const StepResult step = stepper.heun_step_fixed(state, infiltration, dt);
  CHECK(step.dt == dt);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) CHECK(state.h(i, j) == doctest::Approx(0.5 + dt * 2e-5).epsilon(1e-15));
  CHECK(state.time == dt);
}

TEST_CASE("both Heun stages take the rain of the step start") {
  // The step ends on the breakpoint; the new intensity starts with the next step.
  const StructuredGrid grid{4, 4, 1.0, 1.0, 0.0, 0.0};
  FlowState state(grid);
  state.h.fill_interior(1.0);
  StepConfig config;
  config.rain = {{{0.0, 1e-5}, {0.1, 3e-5}}};
  Stepper stepper(grid, Topography(grid), config);
  InfiltrationState infiltration(grid);
  const double dt = 0.1;
  StepResult step = stepper.heun_step_fixed(state, infiltration, dt);
  CHECK(state.h(2, 2) == doctest::Approx(1.0 + dt * 1e-5).epsilon(1e-15));
  CHECK(step.volumes.rain == doctest::Approx(dt * 1e-5 * 16.0).epsilon(1e-14));
  step = stepper.heun_step_fixed(state, infiltration, dt);
  CHECK(state.h(2, 2) == doctest::Approx(1.0 + dt * 4e-5).epsilon(1e-15));
  CHECK(step.volumes.rain == doctest::Approx(dt * 3e-5 * 16.0).epsilon(1e-14));
}

TEST_CASE("first order takes a single Euler stage") {
  const StructuredGrid grid{3, 3, 1.0, 1.0, 0.0, 0.0};
  FlowState state(grid);
  state.h.fill_interior(1.0);
  StepConfig config;
  config.cfl = CflSettings::defaults_for(1);
  config.rain = {{{0.0, 1e-5}, {0.05, 3e-5}}};
  Stepper stepper(grid, Topography(grid), config);
  InfiltrationState infiltration(grid);
  stepper.heun_step_fixed(state, infiltration, 0.1);
  CHECK(state.h(1, 1) == 1.0 + 0.1 * 1e-5);
}

TEST_CASE("one stage of a dam break is positive and conservative") {
  const StructuredGrid grid{100, 1, 0.1, 0.1, 0.0, 0.0};
  FlowState state(grid);
  for (int i = 0; i < 50; ++i) state.h(i, 0) = 1.0;
  Stepper stepper(grid, Topography(grid), StepConfig{});
  const double dt = stepper.compute_dt(state, kInf);
  const StageResult stage = stepper.euler_stage(state, InfiltrationState(grid), dt);
  CHECK(min_depth(stage.state) >= 0.0);
  const double before = total_water_volume(state, grid);
  const double after = total_water_volume(stage.state, grid);
  CHECK(std::abs(after - before) <= 1e-12 * before);
}

TEST_CASE("positivity over random dam breaks on dry beds") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> depth(0.0, 2.0), bed(0.0, 0.5), unit(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const StructuredGrid grid{30, 20, 0.1, 0.1, 0.0, 0.0};
    Topography topo(grid);
    FlowState state(grid);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        topo.z(i, j) = bed(rng);
        state.h(i, j) = unit(rng) < 0.4 ? depth(rng) : 0.0;
      }
    StepConfig config;
    config.friction = {FrictionKind::darcy_weisbach, 0.26};
    Stepper stepper(grid, topo, config);
    InfiltrationState infiltration(grid);
    for (int n = 0; n < 60; ++n) {
      stepper.heun_step(state, infiltration, kInf);
      REQUIRE(min_depth(state) >= 0.0);
    }
  }
}

TEST_CASE("rain on dry soil stays positive and closes the balance") {
  const StructuredGrid grid{20, 12, 0.1, 0.1, 0.0, 0.0};
  Topography topo(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) topo.z(i, j) = 0.02 * grid.cell_x(i) + 0.01 * std::sin(7.0 * grid.cell_y(j));
  StepConfig config;
  config.rain = {{{0.0, 1e-4}}};
  config.infiltration = true;
  config.soil = {4.4e-6, 0.06, 0.12};
  config.friction = {FrictionKind::darcy_weisbach, 0.26};
  config.boundaries[Side::left] = BoundaryKind::neumann;
  Stepper stepper(grid, topo, config);
  FlowState state(grid);
  InfiltrationState infiltration(grid);
  double rain = 0.0, infiltrated = 0.0, outflow = 0.0;
  int steps = 0;
  while (state.time < 120.0) {
    const StepResult step = stepper.heun_step(state, infiltration, 120.0 - state.time);
    rain += step.volumes.rain;
    infiltrated += step.volumes.infiltrated;
    outflow += step.volumes.total_outflow();
    ++steps;
    REQUIRE(min_depth(state) >= 0.0);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) REQUIRE(infiltration.V_inf(i, j) >= 0.0);
  }
  CHECK(steps >= 100);
  CHECK(infiltrated > 0.0);
  const double residual = total_water_volume(state, grid) - rain + infiltrated + outflow;
  CHECK(std::abs(residual) <= 1e-10 * rain);
}

TEST_CASE("1D mode keeps the transverse discharge at zero") {
  const StructuredGrid grid{40, 1, 0.1, 0.1, 0.0, 0.0};
  FlowState state(grid);
  for (int i = 0; i < 40; ++i) state.h(i, 0) = i < 20 ? 1.0 : 0.2;
  Stepper stepper(grid, Topography(grid), StepConfig{});
  InfiltrationState infiltration(grid);
  for (int n = 0; n < 20; ++n) stepper.heun_step(state, infiltration, kInf);
  for (int i = 0; i < 40; ++i) CHECK(state.qy(i, 0) == 0.0);
}

TEST_CASE("periodic uniform flow stays uniform") {
  const StructuredGrid grid{16, 8, 0.1, 0.1, 0.0, 0.0};
  FlowState state(grid);
  state.h.fill_interior(0.3);
  state.qx.fill_interior(0.2);
  StepConfig config;
  config.boundaries[Side::left] = config.boundaries[Side::right] = BoundaryKind::periodic;
  Stepper stepper(grid, Topography(grid), config);
  InfiltrationState infiltration(grid);
  for (int n = 0; n < 20; ++n) stepper.heun_step(state, infiltration, kInf);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      CHECK(state.h(i, j) == doctest::Approx(0.3).epsilon(1e-14));
      CHECK(state.qx(i, j) == doctest::Approx(0.2).epsilon(1e-14));
    }
}

TEST_CASE("results do not depend on the thread count") {
  const StructuredGrid grid{30, 25, 0.1, 0.1, 0.0, 0.0};
  const Topography topo = bump_bed(grid);
  FlowState initial(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) initial.h(i, j) = i < 10 ? 1.5 - topo.z(i, j) * 0.5 : 0.0;
  auto run = [&](int threads) {
    StepConfig config;
    config.threads = threads;
    config.rain = {{{0.0, 1e-4}}};
    config.friction = {FrictionKind::manning, 0.03};
    Stepper stepper(grid, topo, config);
    FlowState state = initial;
    InfiltrationState infiltration(grid);
    for (int n = 0; n < 40; ++n) stepper.heun_step(state, infiltration, kInf);
    return state;
  };
  const FlowState a = run(1), b = run(3);
  CHECK(a.h.interior_equals(b.h));
  CHECK(a.qx.interior_equals(b.qx));
  CHECK(a.qy.interior_equals(b.qy));
  CHECK(a.time == b.time);
}

TEST_CASE("a step that is far too long fails with a located diagnostic") {
  const StructuredGrid grid{20, 1, 0.1, 0.1, 0.0, 0.0};
  FlowState state(grid);
  for (int i = 0; i < 10; ++i) state.h(i, 0) = 1.0;
  StepConfig config;
  Stepper stepper(grid, Topography(grid), config);
  InfiltrationState infiltration(grid);
  try {
    stepper.heun_step_fixed(state, infiltration, 1.0);
    FAIL("expected a NumericalError");
  } catch (const NumericalError& err) {
    const std::string msg = err.what();
    CHECK(msg.find("negative depth") != std::string::npos);
    CHECK(msg.find("at cell (") != std::string::npos);
    CHECK(msg.find("predictor") != std::string::npos);
  }
}

TEST_CASE("non-finite input is reported") {
  const StructuredGrid grid{5, 5, 0.1, 0.1, 0.0, 0.0};
  FlowState state(grid);
  state.h.fill_interior(1.0);
  state.qx(2, 3) = std::numeric_limits<double>::quiet_NaN();
  StepConfig config;
  config.cfl.max_retries = 0;
  Stepper stepper(grid, Topography(grid), config);
  InfiltrationState infiltration(grid);
  CHECK_THROWS_AS(stepper.heun_step_fixed(state, infiltration, 1e-3), NumericalError);
}

TEST_CASE("a failed step leaves the state untouched") {
  const StructuredGrid grid{100, 1, 0.1, 0.1, 0.0, 0.0};
  FlowState state(grid);
  for (int i = 0; i < 50; ++i) state.h(i, 0) = 1.0;
  StepConfig config;
  Stepper stepper(grid, Topography(grid), config);
  InfiltrationState infiltration(grid);
  const FlowState before = state;
  CHECK_THROWS_AS(stepper.heun_step_fixed(state, infiltration, 1.0), NumericalError);
  CHECK(state.time == before.time);
  for (int i = 0; i < 100; ++i) {
    CHECK(state.h(i, 0) == before.h(i, 0));
    CHECK(state.qx(i, 0) == before.qx(i, 0));
  }
  const double dt = stepper.compute_dt(state, kInf);
  CHECK_NOTHROW(stepper.heun_step_fixed(state, infiltration, 0.5 * dt));
  CHECK(min_depth(state) >= 0.0);
}

TEST_CASE("retries stop after max_retries halvings") {
  const StructuredGrid grid{5, 5, 0.1, 0.1, 0.0, 0.0};
  FlowState state(grid);
  state.h.fill_interior(1.0);
  state.qx(2, 3) = std::numeric_limits<double>::quiet_NaN();
  StepConfig config;
  config.cfl.max_retries = 3;
  Stepper stepper(grid, Topography(grid), config);
  InfiltrationState infiltration(grid);
  try {
    stepper.heun_step(state, infiltration, kInf);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("(after 3 retries)") != std::string::npos);
  }
}

TEST_CASE("a steep rain burst on a thin film stays positive") {
  const StructuredGrid grid{40, 1, 0.01, 0.01, 0.0, 0.0};
  Topography topo(grid);
  for (int i = 0; i < 40; ++i) topo.z(i, 0) = -0.5 * grid.cell_x(i);
  FlowState state(grid);
  for (int i = 0; i < 40; ++i) state.h(i, 0) = (i % 2) ? 1e-4 : 0.0;
  StepConfig config;
  const double dt_guess = compute_dt(state, topo, grid, config.cfl, 9.81, config.h_dry, kInf);
  config.rain = {{{0.0, 0.0}, {0.25 * dt_guess, 50.0}}};
  Stepper stepper(grid, topo, config);
  InfiltrationState infiltration(grid);
  for (int n = 0; n < 20; ++n) {
    stepper.heun_step(state, infiltration, kInf);
    REQUIRE(min_depth(state) >= 0.0);
  }
}
