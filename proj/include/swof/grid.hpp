#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace swof {

/// Default dry threshold [m]: below it velocities and slopes are zeroed.
inline constexpr double kDefaultDryDepth = 1e-12;

/**
 * @brief Uniform Cartesian grid of nx by ny cells.
 *
 * Cell (i, j) has its center at (origin_x + (i + 1/2) dx, origin_y + (j + 1/2) dy),
 * j increasing northward. ny == 1 is the one-dimensional configuration.
 */
struct StructuredGrid {
  int nx = 1;
  int ny = 1;
  double dx = 1.0;
  double dy = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;

  double cell_x(int i) const { return origin_x + (i + 0.5) * dx; }
  double cell_y(int j) const { return origin_y + (j + 0.5) * dy; }
  double cell_area() const { return dx * dy; }
  std::size_t cell_count() const { return static_cast<std::size_t>(nx) * ny; }
  bool is_1d() const { return ny == 1; }

  /// Throws ConfigError unless nx, ny >= 1 and dx, dy > 0.
  void validate() const;
};

/**
 * @brief Cell-centred scalar field with a one-cell ghost ring.
 *
 * Valid indices are i in [-1, nx] and j in [-1, ny]; storage is row-major
 * with rows of nx + 2 values.
 */
class Field {
 public:
  Field() = default;
  Field(int nx, int ny, double value = 0.0);

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  /// Distance in storage between (i, j) and (i, j + 1).
  std::ptrdiff_t stride() const { return nx_ + 2; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j + 1) * static_cast<std::size_t>(nx_ + 2) +
           static_cast<std::size_t>(i + 1);
  }

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

  /// Sets every interior cell (ghosts untouched).
  void fill_interior(double value);

  /// Bitwise comparison of interior cells only.
  bool interior_equals(const Field& other) const;

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> data_;
};

/// Conserved unknowns (h, hu, hv) and the time they belong to.
struct FlowState {
  Field h;
  Field qx;
  Field qy;
  double time = 0.0;

  FlowState() = default;
  explicit FlowState(const StructuredGrid& grid)
      : h(grid.nx, grid.ny), qx(grid.nx, grid.ny), qy(grid.nx, grid.ny) {}
};

/// Bed elevation per cell. Slopes are never stored.
struct Topography {
  Field z;

  Topography() = default;
  explicit Topography(const StructuredGrid& grid) : z(grid.nx, grid.ny) {}
};

struct PhysicalConstants {
  double g = 9.81;
};

/// u = q / h for h >= h_dry, 0 otherwise.
inline double primitive_velocity(double h, double q, double h_dry) {
  return h >= h_dry ? q / h : 0.0;
}

/// Sum of h dx dy over interior cells, row by row.
double total_water_volume(const FlowState& state, const StructuredGrid& grid);

}  // namespace swof
