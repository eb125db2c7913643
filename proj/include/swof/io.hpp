#pragma once

#include <array>
#include <string>
#include <vector>

#include "swof/grid.hpp"
#include "swof/hydrology.hpp"

namespace swof {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/**
 * @brief ESRI ASCII grid.
 *
 * values are stored with j increasing northward: values[j * ncols + i] is
 * column i of the j-th row counted from the south edge.
 */
struct DemGrid {
  int ncols = 0;
  int nrows = 0;
  double xllcorner = 0.0;
  double yllcorner = 0.0;
  double cellsize = 1.0;
  double nodata_value = -9999.0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * ncols + i]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(j) * ncols + i]; }

  StructuredGrid grid() const;
  /// Copies the values into a field on grid(); ghost cells are left at 0.
  Field to_field() const;
};

/// Throws FormatError with the file name and line number on any deviation from the grammar.
DemGrid read_dem(const std::string& path);
void write_dem(const DemGrid& dem, const std::string& path);

/// Two columns: time [s] and intensity [mm/h]; intensities are converted to m/s.
RainfallForcing read_rain_file(const std::string& path);

/**
 * Plot-ready snapshot: "# t = <t>", an optional provenance comment, then
 * "x y h u v z h+z qx qy" per cell, rows separated by a blank line.
 */
void write_snapshot(const FlowState& state, const Topography& topo, const StructuredGrid& grid,
                    const std::string& path, double t, double h_dry = kDefaultDryDepth,
                    const std::string& provenance = {});

struct SnapshotRecord {
  double x, y, h, u, v, z, eta, qx, qy;
};

struct Snapshot {
  double time = 0.0;
  std::vector<SnapshotRecord> records;  // row-major, south row first
};

Snapshot read_snapshot(const std::string& path);

struct HydrographSample {
  double t;
  double discharge;  // [m^3/s]
};

/// "t Q" rows under a comment header. An empty record writes the header only.
void write_hydrograph(const std::vector<HydrographSample>& record, const std::string& path,
                      const std::string& provenance = {});

/// Volumes [m^3] accumulated over a run.
struct MassBalanceReport {
  double initial = 0.0;
  double rain = 0.0;
  double infiltrated = 0.0;
  std::array<double, 4> outflow{};  // left, right, bottom, top
  double final = 0.0;

  double total_outflow() const { return outflow[0] + outflow[1] + outflow[2] + outflow[3]; }
  /// final - initial - rain + infiltrated + outflow
  double residual() const { return final - initial - rain + infiltrated + total_outflow(); }
};

/// Writes the report and returns its closure residual.
double write_mass_balance(const MassBalanceReport& report, const std::string& path,
                          const std::string& provenance = {});

}  // namespace swof
