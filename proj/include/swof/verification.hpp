#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "swof/oracles.hpp"
#include "swof/stepper.hpp"

namespace swof::verify {

inline constexpr double kLakeTolerance = 1e-12;
inline constexpr double kNegativeDepthTolerance = -1e-15;
inline constexpr double kRitterMinRate = 0.5;
inline constexpr double kSecondOrderMinRate = 1.7;
inline constexpr double kFirstOrderMinRate = 0.8;

/// Measured value against a threshold.
struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool at_most = true;  // pass iff measured <= threshold, else measured >= threshold
  bool pass() const { return at_most ? measured <= threshold : measured >= threshold; }
};

struct Report {
  std::string suite;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool pass() const;
};

void print(std::ostream& out, const Report& report);

// Lake at rest ------------------------------------------------------------

enum class LakeBed { smooth_bump, step };

struct LakeCase {
  LakeBed bed = LakeBed::smooth_bump;
  int n = 100;         // n x n cells on [0, 10]^2
  int steps = 1000;
  double eta = 1.0;
  int threads = 1;
};

struct LakeResult {
  double max_surface_deviation = 0.0;  // over wet cells
  double max_discharge = 0.0;
  int wet_cells = 0;
  int dry_cells = 0;
  double final_time = 0.0;
};

/// Smooth bump peaking at 1.2 above a flat bed, or a 0.6 step with a 1.3 block; both emerge from eta = 1.
Topography lake_bed(const StructuredGrid& grid, LakeBed bed);

LakeResult run_lake(const LakeCase& c);

Report lake_suite();

// Ritter dam break -----------------------------------------------------------

struct RitterCase {
  int n = 400;          // cells on [0, length]
  double length = 10.0;
  double x0 = 5.0;
  double h_left = 0.005;
  double t_end = 6.0;
  int order = 2;
};

struct RitterResult {
  ErrorNorms h_error;
  double min_h = 0.0;  // minimum over every step
  bool finite = true;
  long steps = 0;
  long retries = 0;
};

RitterResult run_ritter(const RitterCase& c);

Report ritter_suite();

// Manufactured steady flow ---------------------------------------------------

struct ManufacturedCase {
  int n = 100;  // cells on [0, 10]
  int order = 2;
  double q0 = 0.5;
  double friction_coefficient = 0.26;  // Darcy-Weisbach f
  int skip = 3;                        // cells left out next to each boundary
};

/// h = 1 + 0.1 exp(-(x - 5)^2).
DepthProfile manufactured_profile();

/**
 * Steady-state residual of one Euler stage, |U* - U| / dt summed over h and q
 * with cell-width weights, starting from the exact manufactured state.
 */
double manufactured_residual(const ManufacturedCase& c);

Report convergence_suite();

}  // namespace swof::verify
