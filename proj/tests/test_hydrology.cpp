#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "swof/errors.hpp"
#include "swof/hydrology.hpp"

using namespace swof;

namespace {
const SoilParameters kSoil{4.4e-6, 0.06, 0.12};
const double kRain = 70.0 * kMillimetresPerHour;
}  // namespace

TEST_CASE("rainfall lookup") {
  const RainfallForcing rain{{{0.0, kRain}, {7200.0, 0.0}}};
  CHECK(rainfall_at(rain, 3600.0) == kRain);
  CHECK(rainfall_at(rain, 0.0) == kRain);
  CHECK(rainfall_at(rain, 7200.0) == 0.0);
  CHECK(rainfall_at(rain, 7201.0) == 0.0);
  CHECK(rainfall_at(RainfallForcing{}, 5.0) == 0.0);
  const RainfallForcing late{{{10.0, 1e-5}}};
  CHECK(rainfall_at(late, 9.999) == 0.0);
  CHECK(rainfall_at(late, 1e9) == 1e-5);
}

TEST_CASE("next rain change") {
  const RainfallForcing rain{{{0.0, kRain}, {7200.0, 0.0}}};
  CHECK(next_rain_change(rain, -1.0) == 0.0);
  CHECK(next_rain_change(rain, 0.0) == 7200.0);
  CHECK(next_rain_change(rain, 100.0) == 7200.0);
  CHECK(std::isinf(next_rain_change(rain, 7200.0)));
  CHECK(std::isinf(next_rain_change(RainfallForcing{}, 0.0)));
}

TEST_CASE("rain and soil validation") {
  CHECK_NOTHROW(RainfallForcing{{{0.0, 1.0}, {1.0, 0.0}}}.validate());
  CHECK_THROWS_AS(RainfallForcing({{{0.0, 1.0}, {0.0, 0.0}}}).validate(), ConfigError);
  CHECK_THROWS_AS(RainfallForcing({{{0.0, -1.0}}}).validate(), ConfigError);
  CHECK_NOTHROW(kSoil.validate());
  CHECK_THROWS_AS(SoilParameters({-1.0, 0.06, 0.12}).validate(), ConfigError);
  CHECK_THROWS_AS(SoilParameters({1.0, -0.06, 0.12}).validate(), ConfigError);
  CHECK_THROWS_AS(SoilParameters({1.0, 0.06, 0.0}).validate(), ConfigError);
  CHECK_THROWS_AS(SoilParameters({1.0, 0.06, 1.5}).validate(), ConfigError);
}

TEST_CASE("infiltration capacity") {
  CHECK(infiltration_capacity(kSoil, 1.2e-3, 0.0) == doctest::Approx(3.08e-5).epsilon(1e-15));
  CHECK(infiltration_capacity(SoilParameters{0.0, 0.06, 0.12}, 1.2e-3, 0.0) == 0.0);
  CHECK(infiltration_capacity(kSoil, 0.0, 0.0) == kUnboundedCapacity);
  // Relative gap to Ks is hf dtheta / V_inf.
  const double far = infiltration_capacity(kSoil, 1e6, 0.0);
  CHECK((far - kSoil.Ks) / kSoil.Ks == doctest::Approx(0.06 * 0.12 / 1e6).epsilon(1e-6));
  const SoilParameters thin{4.4e-6, 1e-3, 0.12};
  CHECK(std::abs(infiltration_capacity(thin, 1e6, 0.0) - thin.Ks) <= 1e-9 * thin.Ks);
  CHECK_THROWS_AS(infiltration_capacity(SoilParameters{1e-6, 0.06, 0.0}, 1e-3, 0.0), ConfigError);
}

TEST_CASE("infiltration capacity is clamped at zero") {
  // Z_f = 0.01: Ks (1 + (0.06 - 1) / 0.01) < 0.
  CHECK(infiltration_capacity(kSoil, 1.2e-3, 1.0) == 0.0);
}

TEST_CASE("infiltrate") {
  InfiltrationStep s = infiltrate(kSoil, 1.2e-3, 0.0, 1.0);
  CHECK(s.rate == 0.0);
  CHECK(s.V_inf == 1.2e-3);
  s = infiltrate_with_capacity(3.08e-5, 1.2e-3, 1.0, 1.0);
  CHECK(s.rate == 3.08e-5);
  CHECK(s.V_inf == doctest::Approx(1.2e-3 + 3.08e-5).epsilon(1e-15));
  s = infiltrate_with_capacity(3.08e-5, 1.2e-3, 1e-6, 1.0);
  CHECK(s.rate == 1e-6);
  s = infiltrate(kSoil, 1.2e-3, 1e-6, 1.0);
  CHECK(s.rate == 1e-6);
  CHECK(s.depth == 1e-6);
  s = infiltrate(kSoil, 0.0, 2e-3, 0.5);
  CHECK(s.depth == 2e-3);
  CHECK(s.rate == 4e-3);
}

TEST_CASE("infiltration never takes more than the surface water") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> vol(0.0, 0.1), depth(0.0, 0.2), step(1e-3, 100.0);
  for (int k = 0; k < 20000; ++k) {
    const double v = (k % 10 == 0) ? 0.0 : vol(rng);
    const double h = depth(rng), dt = step(rng);
    const InfiltrationStep s = infiltrate(kSoil, v, h, dt);
    CHECK(s.depth <= h);
    CHECK(s.depth >= 0.0);
    CHECK(s.V_inf >= v);
  }
}

TEST_CASE("capacity is nonincreasing in V_inf below hf") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> vol(1e-6, 1.0), depth(0.0, 0.06);
  for (int k = 0; k < 10000; ++k) {
    double a = vol(rng), b = vol(rng);
    if (a > b) std::swap(a, b);
    const double h = depth(rng);
    CHECK(infiltration_capacity(kSoil, a, h) >= infiltration_capacity(kSoil, b, h));
  }
}

TEST_CASE("cumulative infiltration is nondecreasing over repeated steps") {
  double v = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const InfiltrationStep s = infiltrate(kSoil, v, 0.01, 1.0);
    CHECK(s.V_inf >= v);
    v = s.V_inf;
  }
  CHECK(v > 0.0);
}
