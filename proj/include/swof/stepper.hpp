#pragma once

#include <array>
#include <limits>
#include <string_view>
#include <vector>

#include "swof/friction.hpp"
#include "swof/grid.hpp"
#include "swof/hydrology.hpp"

namespace swof {

enum class BoundaryKind { wall, neumann, periodic };

/// Domain sides; bottom is the south edge (j = 0), top the north edge.
enum class Side { left = 0, right = 1, bottom = 2, top = 3 };

BoundaryKind parse_boundary_kind(std::string_view name);
std::string_view to_string(BoundaryKind kind);
Side parse_side(std::string_view name);
std::string_view to_string(Side side);

struct BoundaryConditions {
  std::array<BoundaryKind, 4> kind{BoundaryKind::wall, BoundaryKind::wall, BoundaryKind::wall,
                                   BoundaryKind::wall};

  BoundaryKind operator[](Side side) const { return kind[static_cast<int>(side)]; }
  BoundaryKind& operator[](Side side) { return kind[static_cast<int>(side)]; }

  /// Periodic sides must come in pairs.
  void validate() const;
};

struct CflSettings {
  double n_cfl = 0.5;
  int order = 2;
  /// Upper bound on dt.
  double dt_max = std::numeric_limits<double>::infinity();
  /// Times a failed Heun step is retried with half the step.
  int max_retries = 10;

  /// n_cfl = 0.5 at second order, 1 at first order.
  static CflSettings defaults_for(int order);
  void validate() const;
};

/// Everything a stage needs besides the state itself.
struct StepConfig {
  PhysicalConstants constants;
  double h_dry = kDefaultDryDepth;
  CflSettings cfl;
  FrictionLaw friction;
  bool infiltration = false;
  SoilParameters soil;
  RainfallForcing rain;
  BoundaryConditions boundaries;
  int threads = 1;

  void validate() const;
};

/// Volumes [m^3] exchanged by one stage or step.
struct StageVolumes {
  std::array<double, 4> outflow{};  // indexed by Side, positive when leaving the domain
  double rain = 0.0;
  double infiltrated = 0.0;

  double total_outflow() const { return outflow[0] + outflow[1] + outflow[2] + outflow[3]; }
};

struct StageResult {
  FlowState state;
  InfiltrationState infiltration;
  double dt = 0.0;
  StageVolumes volumes;
};

struct StepResult {
  double dt = 0.0;
  StageVolumes volumes;  // Heun-averaged
  int retries = 0;       // halvings before the step succeeded
};

/// Populates the ghost ring of h, qx, qy and z according to the boundary kinds.
void fill_ghosts(FlowState& state, Topography& topo, const BoundaryConditions& bc);

/**
 * @brief Well-balanced finite-volume stepper.
 *
 * Each stage reconstructs faces dimension by dimension (MUSCL on h, h + z
 * and velocities, then the hydrostatic reconstruction), evaluates HLL fluxes
 * with the left/right interface sources, adds the centred topography source,
 * and sums both directions in one unsplit update. Rain, Green-Ampt
 * infiltration and semi-implicit friction follow, in that order.
 *
 * The time step bounds the sum of directional Courant numbers,
 * dt (a_x/dx + a_y/dy) <= n_cfl, with a_d the largest |u_n| + sqrt(g h) over
 * the cell's reconstructed faces in direction d. A direction with a single
 * cell carries no flux and is left out, which makes the 1D bound
 * dt = n_cfl dx / max(|u| + sqrt(g h)).
 *
 * On an all-dry domain the step ends at the next rain breakpoint, and while
 * rain falls it is short enough that the depth R dt it deposits satisfies
 * the same bound: dt sqrt(g R dt) (1/dx + 1/dy) <= n_cfl.
 *
 * Rows are processed in parallel; every reduction is summed per row and then
 * over rows in index order, so results do not depend on the thread count.
 */
class Stepper {
 public:
  Stepper(const StructuredGrid& grid, const Topography& topo, StepConfig config);

  const StructuredGrid& grid() const { return grid_; }
  const Topography& topography() const { return topo_; }
  const StepConfig& config() const { return config_; }

  double compute_dt(const FlowState& state, double t_remaining);

  /// One forward-Euler stage of size dt starting at state.time.
  StageResult euler_stage(const FlowState& state, const InfiltrationState& infiltration, double dt);

  /**
   * Heun predictor-corrector with dt from the CFL bound of the input state
   * (clipped to t_remaining), frozen across both stages. At first order a
   * single Euler stage is taken. Advances state and infiltration in place.
   *
   * The bound holds for the input state only; when the corrector meets
   * faster waves (rain on a thin film, say) a stage can fail. The whole step
   * is then retried from the input state with dt halved, at most
   * cfl.max_retries times, before the NumericalError is passed on.
   */
  StepResult heun_step(FlowState& state, InfiltrationState& infiltration, double t_remaining);

  /// As heun_step with an imposed dt and no retries.
  StepResult heun_step_fixed(FlowState& state, InfiltrationState& infiltration, double dt);

 private:
  struct FaceSet {
    Field h_lo, h_hi, un_lo, un_hi, ut_lo, ut_hi, z_lo, z_hi;
    void resize(int nx, int ny);
  };
  struct FluxSet {
    Field mass, normal_lo, normal_hi, transverse;  // normal_lo feeds the cell below the face
    void resize(int nx, int ny);
  };

  void prepare(FlowState& state);
  void reconstruct(bool want_rates);
  double max_rate() const;
  double dt_from_rate(double rate, double t, double t_remaining) const;
  // rain_time: start of the step; rain is constant over it.
  StageVolumes stage(const FlowState& in, const Field& v_in, double dt, double rain_time, FlowState& out,
                     Field& v_out, std::string_view label);
  StepResult advance(FlowState& state, InfiltrationState& infiltration, double dt, bool rates_ready);

  StructuredGrid grid_;
  Topography topo_;
  StepConfig config_;

  const double* stage_in_h_ = nullptr;
  Field u_, v_, eta_;
  Field rate_;
  FaceSet fx_, fy_;
  FluxSet flux_x_, flux_y_;
  FlowState stage_a_, stage_b_;
  Field v_inf_a_, v_inf_b_;
  std::vector<double> row_outflow_left_, row_outflow_right_, row_infiltrated_;
  std::vector<int> row_error_;
  Field infiltrated_, convective_;
};

/// CFL step of a standalone state. Boundaries are walls unless given.
double compute_dt(const FlowState& state, const Topography& topo, const StructuredGrid& grid,
                  const CflSettings& settings, double g, double h_dry, double t_remaining,
                  const BoundaryConditions& bc = {});

StageResult euler_stage(const FlowState& state, const InfiltrationState& infiltration,
                        const Topography& topo, const StructuredGrid& grid, const StepConfig& config,
                        double dt);

StepResult heun_step(FlowState& state, InfiltrationState& infiltration, const Topography& topo,
                     const StructuredGrid& grid, const StepConfig& config, double t_remaining);

}  // namespace swof
