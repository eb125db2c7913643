#include "swof/grid.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "swof/errors.hpp"

namespace swof {

void StructuredGrid::validate() const {
  if (nx < 1 || ny < 1) {
    throw ConfigError("invalid dimension: nx=" + std::to_string(nx) + ", ny=" + std::to_string(ny));
  }
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy)) {
    throw ConfigError("cell size must be positive and finite");
  }
}

Field::Field(int nx, int ny, double value)
    : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx + 2) * static_cast<std::size_t>(ny + 2), value) {}

void Field::fill_interior(double value) {
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      (*this)(i, j) = value;
    }
  }
}

bool Field::interior_equals(const Field& other) const {
  if (nx_ != other.nx_ || ny_ != other.ny_) {
    return false;
  }
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      // Representation compare: -0.0 differs from 0.0.
      const double a = (*this)(i, j);
      const double b = other(i, j);
      if (std::memcmp(&a, &b, sizeof(double)) != 0) {
        return false;
      }
    }
  }
  return true;
}

double total_water_volume(const FlowState& state, const StructuredGrid& grid) {
  double volume = 0.0;
  for (int j = 0; j < grid.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < grid.nx; ++i) {
      row += state.h(i, j);
    }
    volume += row;
  }
  return volume * grid.cell_area();
}

}  // namespace swof
