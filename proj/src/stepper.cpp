#include "swof/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "swof/errors.hpp"
#include "swof/reconstruction.hpp"
#include "swof/riemann.hpp"

namespace swof {

namespace {

/// Depths in (-kNegativeTolerance, 0) are roundoff and are snapped to 0.
constexpr double kNegativeTolerance = 1e-15;

void fill_x(Field& f, BoundaryKind left, BoundaryKind right, double wall_parity) {
  const int nx = f.nx();
  for (int j = 0; j < f.ny(); ++j) {
    f(-1, j) = left == BoundaryKind::periodic ? f(nx - 1, j)
                                              : (left == BoundaryKind::wall ? wall_parity : 1.0) * f(0, j);
    f(nx, j) = right == BoundaryKind::periodic
                   ? f(0, j)
                   : (right == BoundaryKind::wall ? wall_parity : 1.0) * f(nx - 1, j);
  }
}

void fill_y(Field& f, BoundaryKind bottom, BoundaryKind top, double wall_parity) {
  const int ny = f.ny();
  for (int i = -1; i <= f.nx(); ++i) {
    f(i, -1) = bottom == BoundaryKind::periodic
                   ? f(i, ny - 1)
                   : (bottom == BoundaryKind::wall ? wall_parity : 1.0) * f(i, 0);
    f(i, ny) = top == BoundaryKind::periodic ? f(i, 0)
                                             : (top == BoundaryKind::wall ? wall_parity : 1.0) * f(i, ny - 1);
  }
}

void fill_topography_ghosts(Topography& topo, const BoundaryConditions& bc) {
  fill_x(topo.z, bc[Side::left], bc[Side::right], 1.0);
  fill_y(topo.z, bc[Side::bottom], bc[Side::top], 1.0);
}

void fill_flow_ghosts(FlowState& state, const BoundaryConditions& bc) {
  const auto l = bc[Side::left], r = bc[Side::right], b = bc[Side::bottom], t = bc[Side::top];
  fill_x(state.h, l, r, 1.0);
  fill_x(state.qx, l, r, -1.0);
  fill_x(state.qy, l, r, 1.0);
  fill_y(state.h, b, t, 1.0);
  fill_y(state.qx, b, t, 1.0);
  fill_y(state.qy, b, t, -1.0);
}

}  // namespace

BoundaryKind parse_boundary_kind(std::string_view name) {
  if (name == "wall") return BoundaryKind::wall;
  if (name == "neumann") return BoundaryKind::neumann;
  if (name == "periodic") return BoundaryKind::periodic;
  throw ConfigError("unknown boundary kind '" + std::string(name) + "' (expected wall, neumann or periodic)");
}

std::string_view to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::neumann:
      return "neumann";
    case BoundaryKind::periodic:
      return "periodic";
    case BoundaryKind::wall:
      break;
  }
  return "wall";
}

Side parse_side(std::string_view name) {
  if (name == "left") return Side::left;
  if (name == "right") return Side::right;
  if (name == "bottom") return Side::bottom;
  if (name == "top") return Side::top;
  throw ConfigError("unknown side '" + std::string(name) + "' (expected left, right, bottom or top)");
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::left:
      return "left";
    case Side::right:
      return "right";
    case Side::bottom:
      return "bottom";
    case Side::top:
      break;
  }
  return "top";
}

void BoundaryConditions::validate() const {
  if ((kind[0] == BoundaryKind::periodic) != (kind[1] == BoundaryKind::periodic)) {
    throw ConfigError("periodic boundaries must pair left with right");
  }
  if ((kind[2] == BoundaryKind::periodic) != (kind[3] == BoundaryKind::periodic)) {
    throw ConfigError("periodic boundaries must pair bottom with top");
  }
}

CflSettings CflSettings::defaults_for(int order) {
  CflSettings s;
  s.order = order;
  s.n_cfl = order == 1 ? 1.0 : 0.5;
  return s;
}

void CflSettings::validate() const {
  if (max_retries < 0) {
    throw ConfigError("max_retries must be >= 0");
  }
  if (order != 1 && order != 2) {
    throw ConfigError("order must be 1 or 2");
  }
  if (!(n_cfl > 0.0 && n_cfl <= 1.0)) {
    throw ConfigError("cfl must be in (0, 1]");
  }
  if (!(dt_max > 0.0)) {
    throw ConfigError("dt_max must be > 0");
  }
}

void StepConfig::validate() const {
  if (!(constants.g > 0.0) || !std::isfinite(constants.g)) {
    throw ConfigError("g must be > 0");
  }
  if (!(h_dry > 0.0)) {
    throw ConfigError("h_dry must be > 0");
  }
  cfl.validate();
  if (!(friction.coefficient >= 0.0) || !std::isfinite(friction.coefficient)) {
    throw ConfigError("friction_coefficient must be >= 0");
  }
  if (infiltration) {
    soil.validate();
  }
  rain.validate();
  boundaries.validate();
  if (threads < 1) {
    throw ConfigError("threads must be >= 1");
  }
}

void fill_ghosts(FlowState& state, Topography& topo, const BoundaryConditions& bc) {
  fill_topography_ghosts(topo, bc);
  fill_flow_ghosts(state, bc);
}

void Stepper::FaceSet::resize(int nx, int ny) {
  for (Field* f : {&h_lo, &h_hi, &un_lo, &un_hi, &ut_lo, &ut_hi, &z_lo, &z_hi}) {
    *f = Field(nx, ny);
  }
}

void Stepper::FluxSet::resize(int nx, int ny) {
  for (Field* f : {&mass, &normal_lo, &normal_hi, &transverse}) {
    *f = Field(nx, ny);
  }
}

Stepper::Stepper(const StructuredGrid& grid, const Topography& topo, StepConfig config)
    : grid_(grid), topo_(topo), config_(std::move(config)) {
  grid_.validate();
  config_.validate();
  if (topo_.z.nx() != grid_.nx || topo_.z.ny() != grid_.ny) {
    throw ConfigError("topography does not match the grid");
  }
  fill_topography_ghosts(topo_, config_.boundaries);
  const int nx = grid_.nx, ny = grid_.ny;
  u_ = Field(nx, ny);
  v_ = Field(nx, ny);
  eta_ = Field(nx, ny);
  rate_ = Field(nx, ny);
  fx_.resize(nx, ny);
  fy_.resize(nx, ny);
  flux_x_.resize(nx, ny);
  flux_y_.resize(nx, ny);
  stage_a_ = FlowState(grid_);
  stage_b_ = FlowState(grid_);
  v_inf_a_ = Field(nx, ny);
  v_inf_b_ = Field(nx, ny);
  row_outflow_left_.assign(ny, 0.0);
  row_outflow_right_.assign(ny, 0.0);
  row_infiltrated_.assign(ny, 0.0);
  row_error_.assign(ny, 0);
  infiltrated_ = Field(nx, ny);
  convective_ = Field(nx, ny);
}

void Stepper::prepare(FlowState& state) {
  fill_flow_ghosts(state, config_.boundaries);
  stage_in_h_ = state.h.raw().data();
  const double h_dry = config_.h_dry;
  const auto h = state.h.raw(), qx = state.qx.raw(), qy = state.qy.raw(), z = topo_.z.raw();
  auto u = u_.raw(), v = v_.raw(), eta = eta_.raw();
  for (std::size_t c = 0; c < h.size(); ++c) {
    u[c] = primitive_velocity(h[c], qx[c], h_dry);
    v[c] = primitive_velocity(h[c], qy[c], h_dry);
    eta[c] = h[c] + z[c];
  }
}

namespace {

struct FaceView {
  double *h_lo, *h_hi, *un_lo, *un_hi, *ut_lo, *ut_hi, *z_lo, *z_hi;
};

/// Reconstructs cells [c0, c0 + count * step) along a direction whose neighbour offset is `off`.
/// Reconstructs `count` consecutive cells along a direction whose neighbour offset is `off`.
/// Pointers address the first cell of the run.
void reconstruct_kernel(const double* __restrict hp, const double* __restrict ep, const double* __restrict np,
                        const double* __restrict tp, const double* __restrict zp, std::ptrdiff_t off, int count,
                        double h_dry, bool second_order, double* __restrict h_lo, double* __restrict h_hi,
                        double* __restrict un_lo, double* __restrict un_hi, double* __restrict ut_lo,
                        double* __restrict ut_hi, double* __restrict z_lo, double* __restrict z_hi) {
  for (int n = 0; n < count; ++n) {
    const Stencil s{{hp[n - off], hp[n], hp[n + off]},
                    {ep[n - off], ep[n], ep[n + off]},
                    {np[n - off], np[n], np[n + off]},
                    {tp[n - off], tp[n], tp[n + off]},
                    zp[n]};
    const CellReconstruction r = reconstruct_cell(s, h_dry, second_order);
    h_lo[n] = r.h_left;
    h_hi[n] = r.h_right;
    un_lo[n] = r.u_left;
    un_hi[n] = r.u_right;
    ut_lo[n] = r.v_left;
    ut_hi[n] = r.v_right;
    z_lo[n] = r.z_left;
    z_hi[n] = r.z_right;
  }
}

void reconstruct_run(const double* h, const double* eta, const double* un, const double* ut, const double* z,
                     std::size_t c0, std::ptrdiff_t off, int count, double h_dry, bool second_order,
                     const FaceView& out) {
  reconstruct_kernel(h + c0, eta + c0, un + c0, ut + c0, z + c0, off, count, h_dry, second_order, out.h_lo + c0,
                     out.h_hi + c0, out.un_lo + c0, out.un_hi + c0, out.ut_lo + c0, out.ut_hi + c0, out.z_lo + c0,
                     out.z_hi + c0);
}

/// Fluxes through `count` faces. a_* are the hi faces of the cells below, b_* the lo faces of
/// the cells above; results are stored at the index of the cell above.
void flux_kernel(const double* __restrict a_h, const double* __restrict a_z, const double* __restrict a_un,
                 const double* __restrict a_ut, const double* __restrict b_h, const double* __restrict b_z,
                 const double* __restrict b_un, const double* __restrict b_ut, int count, double g, double h_dry,
                 double* __restrict mass, double* __restrict n_lo, double* __restrict n_hi,
                 double* __restrict t) {
  for (int n = 0; n < count; ++n) {
    const HydrostaticDepths d = hydrostatic_reconstruct(a_h[n], a_z[n], b_h[n], b_z[n]);
    const DirectionalFlux fl = transverse_flux(d.left, a_un[n], a_ut[n], d.right, b_un[n], b_ut[n], g, h_dry);
    mass[n] = fl.mass;
    n_lo[n] = fl.normal + interface_source(a_h[n], d.left, g);
    n_hi[n] = fl.normal + interface_source(b_h[n], d.right, g);
    t[n] = fl.transverse;
  }
}

/// Writes the face of ghost cell `g` that touches the domain, from the faces of cell `src`.
/// `from_hi` selects which face of src is copied; `to_hi` which face of g is written.
void ghost_face(const FaceView& f, std::size_t g, std::size_t src, bool from_hi, bool to_hi,
                double normal_parity) {
  const double h = from_hi ? f.h_hi[src] : f.h_lo[src];
  const double un = from_hi ? f.un_hi[src] : f.un_lo[src];
  const double ut = from_hi ? f.ut_hi[src] : f.ut_lo[src];
  const double z = from_hi ? f.z_hi[src] : f.z_lo[src];
  (to_hi ? f.h_hi : f.h_lo)[g] = h;
  (to_hi ? f.un_hi : f.un_lo)[g] = normal_parity * un;
  (to_hi ? f.ut_hi : f.ut_lo)[g] = ut;
  (to_hi ? f.z_hi : f.z_lo)[g] = z;
}

void boundary_faces(const FaceView& f, std::size_t lo_ghost, std::size_t first, std::size_t last,
                    std::size_t hi_ghost, BoundaryKind lo, BoundaryKind hi) {
  if (lo == BoundaryKind::periodic) {
    ghost_face(f, lo_ghost, last, true, true, 1.0);
  } else {
    ghost_face(f, lo_ghost, first, false, true, lo == BoundaryKind::wall ? -1.0 : 1.0);
  }
  if (hi == BoundaryKind::periodic) {
    ghost_face(f, hi_ghost, first, false, false, 1.0);
  } else {
    ghost_face(f, hi_ghost, last, true, false, hi == BoundaryKind::wall ? -1.0 : 1.0);
  }
}

FaceView view(Field& h_lo, Field& h_hi, Field& un_lo, Field& un_hi, Field& ut_lo, Field& ut_hi,
              Field& z_lo, Field& z_hi) {
  return {h_lo.raw().data(),  h_hi.raw().data(),  un_lo.raw().data(), un_hi.raw().data(),
          ut_lo.raw().data(), ut_hi.raw().data(), z_lo.raw().data(),  z_hi.raw().data()};
}

double face_rate(double h_lo, double u_lo, double h_hi, double u_hi, double g) {
  return std::max(std::abs(u_lo) + std::sqrt(g * h_lo), std::abs(u_hi) + std::sqrt(g * h_hi));
}

struct UpdateArgs {
  double lx, ly, dt, g, h_dry, rain_depth;
  SoilParameters soil;
  double friction;
  std::ptrdiff_t stride;
  FaceView fx, fy;
  const double *mx, *nlo_x, *nhi_x, *tx, *my, *nlo_y, *nhi_y, *ty;
  const double *h_in, *qx_in, *qy_in, *v_in;
  double *h_out, *qx_out, *qy_out, *v_out, *infiltrated, *convective;
};

inline bool is_finite(double x) { return std::abs(x) <= std::numeric_limits<double>::max(); }

/**
 * Updates `count` cells from c0: flux divergence and centred sources, the
 * negative-depth snap, rain, infiltration and friction. Returns 1 if a
 * convective depth fell below -kNegativeTolerance or a value is not finite.
 * Branch-free so that it vectorizes; the law and infiltration switch are
 * template parameters.
 */
template <FrictionKind Law, bool Infiltrating>
int update_kernel(const UpdateArgs& a, std::size_t c0, int count) {
  // Local copies: stores through the output pointers could otherwise alias `a`.
  const std::ptrdiff_t sy = a.stride;
  const double g = a.g, lx = a.lx, ly = a.ly, dt = a.dt, h_dry = a.h_dry, rain = a.rain_depth, cf = a.friction;
  const SoilParameters soil = a.soil;
  const double *xhl = a.fx.h_lo + c0, *xhh = a.fx.h_hi + c0, *xzl = a.fx.z_lo + c0, *xzh = a.fx.z_hi + c0;
  const double *yhl = a.fy.h_lo + c0, *yhh = a.fy.h_hi + c0, *yzl = a.fy.z_lo + c0, *yzh = a.fy.z_hi + c0;
  const double *mx = a.mx + c0, *nlo_x = a.nlo_x + c0, *nhi_x = a.nhi_x + c0, *tx = a.tx + c0;
  const double *my = a.my + c0, *nlo_y = a.nlo_y + c0, *nhi_y = a.nhi_y + c0, *ty = a.ty + c0;
  const double *h_in = a.h_in + c0, *qx_in = a.qx_in + c0, *qy_in = a.qy_in + c0, *v_in = a.v_in + c0;
  double *h_out = a.h_out + c0, *qx_out = a.qx_out + c0, *qy_out = a.qy_out + c0, *v_out = a.v_out + c0;
  double* infiltrated = a.infiltrated + c0;
  double* convective = a.convective + c0;
#pragma GCC ivdep
  for (int i = 0; i < count; ++i) {
    const double sc_x = centered_source(xhl[i], xhh[i], xzl[i], xzh[i], g);
    const double sc_y = centered_source(yhl[i], yhh[i], yzl[i], yzh[i], g);

    double h = h_in[i] - lx * (mx[i + 1] - mx[i]) - ly * (my[i + sy] - my[i]);
    const double qx = qx_in[i] - lx * (nlo_x[i + 1] - nhi_x[i] - sc_x) - ly * (ty[i + sy] - ty[i]);
    const double qy = qy_in[i] - lx * (tx[i + 1] - tx[i]) - ly * (nlo_y[i + sy] - nhi_y[i] - sc_y);

    convective[i] = h;
    h = h < 0.0 ? 0.0 : h;
    h += rain;
    double v_inf = v_in[i];
    if constexpr (Infiltrating) {
      const double depth = std::min(h, dt * green_ampt_capacity(soil, v_inf, h));
      h -= depth;
      v_inf += depth;
      infiltrated[i] = depth;
    } else {
      infiltrated[i] = 0.0;
    }
    const double q_old = std::sqrt(qx_in[i] * qx_in[i] + qy_in[i] * qy_in[i]);
    const double divisor = friction_divisor_of<Law>(h, q_old, h_in[i], cf, dt, g, h_dry);
    const bool wet = h >= h_dry;
    const double qx_new = wet ? qx / divisor : 0.0;
    const double qy_new = wet ? qy / divisor : 0.0;
    h_out[i] = h;
    qx_out[i] = qx_new;
    qy_out[i] = qy_new;
    v_out[i] = v_inf;
  }
  // Separate pass: an integer reduction in the loop above would keep it scalar.
  bool bad = false;
  for (int i = 0; i < count; ++i) {
    bad |= (convective[i] <= -kNegativeTolerance) | !is_finite(h_out[i]) | !is_finite(qx_out[i]) |
           !is_finite(qy_out[i]);
  }
  return bad ? 1 : 0;
}

using UpdateKernel = int (*)(const UpdateArgs&, std::size_t, int);

UpdateKernel update_kernel_for(FrictionKind law, bool infiltrating) {
  switch (law) {
    case FrictionKind::darcy_weisbach:
      return infiltrating ? update_kernel<FrictionKind::darcy_weisbach, true>
                          : update_kernel<FrictionKind::darcy_weisbach, false>;
    case FrictionKind::manning:
      return infiltrating ? update_kernel<FrictionKind::manning, true> : update_kernel<FrictionKind::manning, false>;
    case FrictionKind::none:
      break;
  }
  return infiltrating ? update_kernel<FrictionKind::none, true> : update_kernel<FrictionKind::none, false>;
}

}  // namespace

void Stepper::reconstruct(bool want_rates) {
  const int nx = grid_.nx, ny = grid_.ny;
  const double h_dry = config_.h_dry, g = config_.constants.g;
  const bool second = config_.cfl.order == 2;
  const std::ptrdiff_t stride = u_.stride();
  const double* h = stage_in_h_;
  const double* eta = eta_.raw().data();
  const double* u = u_.raw().data();
  const double* v = v_.raw().data();
  const double* z = topo_.z.raw().data();
  const FaceView fx = view(fx_.h_lo, fx_.h_hi, fx_.un_lo, fx_.un_hi, fx_.ut_lo, fx_.ut_hi, fx_.z_lo, fx_.z_hi);
  const FaceView fy = view(fy_.h_lo, fy_.h_hi, fy_.un_lo, fy_.un_hi, fy_.ut_lo, fy_.ut_hi, fy_.z_lo, fy_.z_hi);
  const auto& bc = config_.boundaries;
  const bool x_active = nx > 1, y_active = ny > 1;
  double* rate = rate_.raw().data();
  const double inv_dx = 1.0 / grid_.dx, inv_dy = 1.0 / grid_.dy;

#pragma omp parallel for schedule(static) num_threads(config_.threads)
  for (int j = 0; j < ny; ++j) {
    const std::size_t c0 = u_.index(0, j);
    reconstruct_run(h, eta, u, v, z, c0, 1, nx, h_dry, second, fx);
    reconstruct_run(h, eta, v, u, z, c0, stride, nx, h_dry, second, fy);
    boundary_faces(fx, c0 - 1, c0, c0 + nx - 1, c0 + nx, bc[Side::left], bc[Side::right]);
    if (want_rates) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t c = c0 + i;
        double r = 0.0;
        if (x_active) r += face_rate(fx.h_lo[c], fx.un_lo[c], fx.h_hi[c], fx.un_hi[c], g) * inv_dx;
        if (y_active) r += face_rate(fy.h_lo[c], fy.un_lo[c], fy.h_hi[c], fy.un_hi[c], g) * inv_dy;
        rate[c] = r;
      }
    }
  }
  for (int i = 0; i < nx; ++i) {
    boundary_faces(fy, u_.index(i, -1), u_.index(i, 0), u_.index(i, ny - 1), u_.index(i, ny),
                   bc[Side::bottom], bc[Side::top]);
  }
}

double Stepper::max_rate() const {
  double m = 0.0;
  for (int j = 0; j < grid_.ny; ++j) {
    for (int i = 0; i < grid_.nx; ++i) {
      m = std::max(m, rate_(i, j));
    }
  }
  return m;
}

double Stepper::dt_from_rate(double rate, double t, double t_remaining) const {
  double dt = std::min(t_remaining, config_.cfl.dt_max);
  if (rate > 0.0) {
    return std::min(dt, config_.cfl.n_cfl / rate);
  }
  // All dry: stop at the next change of rain, and keep the depth one step of rain
  // deposits within the CFL bound.
  dt = std::min(dt, next_rain_change(config_.rain, t) - t);
  const double rain = rainfall_at(config_.rain, t);
  if (rain > 0.0) {
    const double inv_width = (grid_.nx > 1 ? 1.0 / grid_.dx : 0.0) + (grid_.ny > 1 ? 1.0 / grid_.dy : 0.0);
    if (inv_width > 0.0) {
      dt = std::min(dt, std::cbrt(std::pow(config_.cfl.n_cfl / inv_width, 2) / (config_.constants.g * rain)));
    }
  }
  return dt;
}

StageVolumes Stepper::stage(const FlowState& in, const Field& v_in, double dt, double rain_time,
                            FlowState& out, Field& v_out, std::string_view label) {
  const int nx = grid_.nx, ny = grid_.ny;
  const double g = config_.constants.g, h_dry = config_.h_dry;
  const FaceView fx = view(fx_.h_lo, fx_.h_hi, fx_.un_lo, fx_.un_hi, fx_.ut_lo, fx_.ut_hi, fx_.z_lo, fx_.z_hi);
  const FaceView fy = view(fy_.h_lo, fy_.h_hi, fy_.un_lo, fy_.un_hi, fy_.ut_lo, fy_.ut_hi, fy_.z_lo, fy_.z_hi);
  const std::ptrdiff_t stride = u_.stride();

  double* mx = flux_x_.mass.raw().data();
  double* nlo_x = flux_x_.normal_lo.raw().data();
  double* nhi_x = flux_x_.normal_hi.raw().data();
  double* tx = flux_x_.transverse.raw().data();
  double* my = flux_y_.mass.raw().data();
  double* nlo_y = flux_y_.normal_lo.raw().data();
  double* nhi_y = flux_y_.normal_hi.raw().data();
  double* ty = flux_y_.transverse.raw().data();

  // A face sits between cell a below (its hi face) and cell b above (its lo face) and is
  // stored at the index of b.
  auto face_run = [&](const FaceView& f, std::size_t first, std::ptrdiff_t off, int count, double* mass,
                      double* n_lo, double* n_hi, double* t) {
    const std::size_t below = first - static_cast<std::size_t>(off);
    flux_kernel(f.h_hi + below, f.z_hi + below, f.un_hi + below, f.ut_hi + below, f.h_lo + first, f.z_lo + first,
                f.un_lo + first, f.ut_lo + first, count, g, h_dry, mass + first, n_lo + first, n_hi + first,
                t + first);
  };

#pragma omp parallel for schedule(static) num_threads(config_.threads)
  for (int j = 0; j <= ny; ++j) {
    const std::size_t c0 = u_.index(0, j);
    if (j < ny) {
      face_run(fx, c0, 1, nx + 1, mx, nlo_x, nhi_x, tx);
    }
    face_run(fy, c0, stride, nx, my, nlo_y, nhi_y, ty);
  }

  UpdateArgs args;
  args.lx = dt / grid_.dx;
  args.ly = dt / grid_.dy;
  args.dt = dt;
  args.g = g;
  args.h_dry = h_dry;
  args.rain_depth = dt * rainfall_at(config_.rain, rain_time);
  args.soil = config_.soil;
  args.friction = config_.friction.coefficient;
  args.stride = stride;
  args.fx = fx;
  args.fy = fy;
  args.mx = mx;
  args.nlo_x = nlo_x;
  args.nhi_x = nhi_x;
  args.tx = tx;
  args.my = my;
  args.nlo_y = nlo_y;
  args.nhi_y = nhi_y;
  args.ty = ty;
  args.h_in = in.h.raw().data();
  args.qx_in = in.qx.raw().data();
  args.qy_in = in.qy.raw().data();
  args.v_in = v_in.raw().data();
  args.h_out = out.h.raw().data();
  args.qx_out = out.qx.raw().data();
  args.qy_out = out.qy.raw().data();
  args.v_out = v_out.raw().data();
  args.infiltrated = infiltrated_.raw().data();
  args.convective = convective_.raw().data();
  const auto kernel = update_kernel_for(config_.friction.kind, config_.infiltration);

#pragma omp parallel for schedule(static) num_threads(config_.threads)
  for (int j = 0; j < ny; ++j) {
    const std::size_t c0 = u_.index(0, j);
    const int flags = kernel(args, c0, nx);
    double infiltrated = 0.0;
    for (int i = 0; i < nx; ++i) {
      infiltrated += args.infiltrated[c0 + i];
    }
    row_outflow_left_[j] = -mx[c0];
    row_outflow_right_[j] = mx[c0 + nx];
    row_infiltrated_[j] = infiltrated;
    row_error_[j] = flags;
  }

  for (int j = 0; j < ny; ++j) {
    if (row_error_[j] != 0) {
      // Replay the row to name the first offending cell.
      const std::size_t c0 = u_.index(0, j);
      for (int i = 0; i < nx; ++i) {
        const std::size_t c = c0 + i;
        const double h = args.convective[c];
        const bool negative = h <= -kNegativeTolerance;
        const bool finite = is_finite(args.h_out[c]) && is_finite(args.qx_out[c]) && is_finite(args.qy_out[c]);
        if (!negative && finite) continue;
        std::ostringstream msg;
        msg.precision(17);
        msg << label << " stage at t = " << in.time << ": ";
        if (negative) {
          msg << "negative depth h = " << h << " at cell (" << i << ", " << j << ") after the convective update";
        } else {
          msg << "non-finite value (h, qx, qy) = (" << args.h_out[c] << ", " << args.qx_out[c] << ", "
              << args.qy_out[c] << ") at cell (" << i << ", " << j << ") after the source terms";
        }
        throw NumericalError(msg.str());
      }
    }
  }

  StageVolumes vol;
  double left = 0.0, right = 0.0, infiltrated = 0.0;
  for (int j = 0; j < ny; ++j) {
    left += row_outflow_left_[j];
    right += row_outflow_right_[j];
    infiltrated += row_infiltrated_[j];
  }
  double bottom = 0.0, top = 0.0;
  for (int i = 0; i < nx; ++i) {
    bottom -= my[u_.index(i, 0)];
    top += my[u_.index(i, ny)];
  }
  vol.outflow[static_cast<int>(Side::left)] = dt * grid_.dy * left;
  vol.outflow[static_cast<int>(Side::right)] = dt * grid_.dy * right;
  vol.outflow[static_cast<int>(Side::bottom)] = dt * grid_.dx * bottom;
  vol.outflow[static_cast<int>(Side::top)] = dt * grid_.dx * top;
  vol.rain = args.rain_depth * static_cast<double>(grid_.cell_count()) * grid_.cell_area();
  vol.infiltrated = infiltrated * grid_.cell_area();
  out.time = in.time + dt;
  return vol;
}

StepResult Stepper::advance(FlowState& state, InfiltrationState& infiltration, double dt, bool ready) {
  if (!ready) {
    prepare(state);
    reconstruct(false);
  }
  const StageVolumes first = stage(state, infiltration.V_inf, dt, state.time, stage_a_, v_inf_a_, "predictor");
  if (config_.cfl.order == 1) {
    std::swap(state.h, stage_a_.h);
    std::swap(state.qx, stage_a_.qx);
    std::swap(state.qy, stage_a_.qy);
    std::swap(infiltration.V_inf, v_inf_a_);
    state.time = stage_a_.time;
    return {dt, first};
  }
  prepare(stage_a_);
  reconstruct(false);
  const StageVolumes second = stage(stage_a_, v_inf_a_, dt, state.time, stage_b_, v_inf_b_, "corrector");

  const double h_dry = config_.h_dry;
  for (int j = 0; j < grid_.ny; ++j) {
    for (int i = 0; i < grid_.nx; ++i) {
      const double h = 0.5 * (state.h(i, j) + stage_b_.h(i, j));
      state.h(i, j) = h;
      if (h < h_dry) {
        state.qx(i, j) = 0.0;
        state.qy(i, j) = 0.0;
      } else {
        state.qx(i, j) = 0.5 * (state.qx(i, j) + stage_b_.qx(i, j));
        state.qy(i, j) = 0.5 * (state.qy(i, j) + stage_b_.qy(i, j));
      }
      infiltration.V_inf(i, j) = 0.5 * (infiltration.V_inf(i, j) + v_inf_b_(i, j));
    }
  }
  state.time += dt;

  StepResult result{dt, {}};
  for (int s = 0; s < 4; ++s) {
    result.volumes.outflow[s] = 0.5 * (first.outflow[s] + second.outflow[s]);
  }
  result.volumes.rain = 0.5 * (first.rain + second.rain);
  result.volumes.infiltrated = 0.5 * (first.infiltrated + second.infiltrated);
  return result;
}

double Stepper::compute_dt(const FlowState& state, double t_remaining) {
  stage_a_ = state;
  prepare(stage_a_);
  reconstruct(true);
  return dt_from_rate(max_rate(), state.time, t_remaining);
}

StageResult Stepper::euler_stage(const FlowState& state, const InfiltrationState& infiltration, double dt) {
  stage_a_ = state;
  prepare(stage_a_);
  reconstruct(false);
  StageResult result{FlowState(grid_), InfiltrationState(grid_), dt, {}};
  result.volumes = stage(stage_a_, infiltration.V_inf, dt, state.time, result.state, result.infiltration.V_inf, "euler");
  return result;
}

StepResult Stepper::heun_step(FlowState& state, InfiltrationState& infiltration, double t_remaining) {
  prepare(state);
  reconstruct(true);
  double dt = dt_from_rate(max_rate(), state.time, t_remaining);
  bool ready = true;
  for (int attempt = 0;; ++attempt) {
    try {
      StepResult result = advance(state, infiltration, dt, ready);
      result.retries = attempt;
      return result;
    } catch (const NumericalError& err) {
      if (attempt >= config_.cfl.max_retries) {
        throw NumericalError(std::string(err.what()) + " (after " + std::to_string(attempt) + " retries)");
      }
    }
    dt *= 0.5;
    ready = false;
  }
}

StepResult Stepper::heun_step_fixed(FlowState& state, InfiltrationState& infiltration, double dt) {
  return advance(state, infiltration, dt, false);
}

double compute_dt(const FlowState& state, const Topography& topo, const StructuredGrid& grid,
                  const CflSettings& settings, double g, double h_dry, double t_remaining,
                  const BoundaryConditions& bc) {
  StepConfig config;
  config.constants.g = g;
  config.h_dry = h_dry;
  config.cfl = settings;
  config.boundaries = bc;
  Stepper stepper(grid, topo, config);
  return stepper.compute_dt(state, t_remaining);
}

StageResult euler_stage(const FlowState& state, const InfiltrationState& infiltration,
                        const Topography& topo, const StructuredGrid& grid, const StepConfig& config,
                        double dt) {
  Stepper stepper(grid, topo, config);
  return stepper.euler_stage(state, infiltration, dt);
}

StepResult heun_step(FlowState& state, InfiltrationState& infiltration, const Topography& topo,
                     const StructuredGrid& grid, const StepConfig& config, double t_remaining) {
  Stepper stepper(grid, topo, config);
  return stepper.heun_step(state, infiltration, t_remaining);
}

}  // namespace swof
