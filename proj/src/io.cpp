#include "swof/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "swof/errors.hpp"

namespace swof {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos > start) out.push_back(line.substr(start, pos - start));
  }
  return out;
}

bool parse_number(std::string_view text, double& value) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && end == text.data() + text.size();
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
  throw FormatError(path + ":" + std::to_string(line) + ": " + what);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  return out;
}

void close_output(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) {
    throw std::runtime_error("error while writing " + path);
  }
}

}  // namespace

std::string format_double(double value) {
  if (value == 0.0) {
    return "0";  // also folds -0
  }
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ec == std::errc() ? end : buf);
}

StructuredGrid DemGrid::grid() const {
  return {ncols, nrows, cellsize, cellsize, xllcorner, yllcorner};
}

Field DemGrid::to_field() const {
  Field f(ncols, nrows);
  for (int j = 0; j < nrows; ++j) {
    for (int i = 0; i < ncols; ++i) {
      f(i, j) = at(i, j);
    }
  }
  return f;
}

DemGrid read_dem(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError(path + ": cannot open file");
  }
  static constexpr std::array<std::string_view, 6> kKeys{"ncols",     "nrows",    "xllcorner",
                                                        "yllcorner", "cellsize", "nodata_value"};
  std::array<double, 6> header{};
  std::string line;
  int line_no = 0;
  for (std::size_t k = 0; k < kKeys.size(); ++k) {
    if (!std::getline(in, line)) {
      fail(path, line_no + 1, "missing header line '" + std::string(kKeys[k]) + "'");
    }
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.size() != 2 || lower(tokens[0]) != kKeys[k]) {
      fail(path, line_no, "malformed header: expected '" + std::string(kKeys[k]) + " <value>'");
    }
    if (!parse_number(tokens[1], header[k])) {
      fail(path, line_no, "malformed header: bad value for " + std::string(kKeys[k]));
    }
  }
  DemGrid dem;
  const double ncols = header[0], nrows = header[1];
  if (ncols < 1 || nrows < 1 || ncols != static_cast<int>(ncols) || nrows != static_cast<int>(nrows)) {
    fail(path, ncols < 1 || ncols != static_cast<int>(ncols) ? 1 : 2, "invalid dimension");
  }
  dem.ncols = static_cast<int>(ncols);
  dem.nrows = static_cast<int>(nrows);
  dem.xllcorner = header[2];
  dem.yllcorner = header[3];
  dem.cellsize = header[4];
  dem.nodata_value = header[5];
  if (!(dem.cellsize > 0.0)) {
    fail(path, 5, "cellsize must be > 0");
  }
  dem.values.assign(static_cast<std::size_t>(dem.ncols) * dem.nrows, 0.0);

  int row = 0;  // counted from the top of the file
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (row >= dem.nrows) {
      fail(path, line_no, "wrong value count: more than " + std::to_string(dem.nrows) + " data rows");
    }
    if (static_cast<int>(tokens.size()) != dem.ncols) {
      fail(path, line_no,
           "wrong value count: expected " + std::to_string(dem.ncols) + " values, found " +
               std::to_string(tokens.size()));
    }
    const int j = dem.nrows - 1 - row;
    for (int i = 0; i < dem.ncols; ++i) {
      double v = 0.0;
      if (!parse_number(tokens[i], v)) {
        fail(path, line_no, "bad value '" + std::string(tokens[i]) + "'");
      }
      if (v == dem.nodata_value || !std::isfinite(v)) {
        fail(path, line_no, "nodata inside domain at column " + std::to_string(i + 1));
      }
      dem.at(i, j) = v;
    }
    ++row;
  }
  if (row != dem.nrows) {
    fail(path, line_no,
         "wrong value count: expected " + std::to_string(dem.nrows) + " data rows, found " + std::to_string(row));
  }
  return dem;
}

void write_dem(const DemGrid& dem, const std::string& path) {
  auto out = open_output(path);
  out << "ncols " << dem.ncols << "\n"
      << "nrows " << dem.nrows << "\n"
      << "xllcorner " << format_double(dem.xllcorner) << "\n"
      << "yllcorner " << format_double(dem.yllcorner) << "\n"
      << "cellsize " << format_double(dem.cellsize) << "\n"
      << "NODATA_value " << format_double(dem.nodata_value) << "\n";
  for (int j = dem.nrows - 1; j >= 0; --j) {
    for (int i = 0; i < dem.ncols; ++i) {
      out << (i ? " " : "") << format_double(dem.at(i, j));
    }
    out << "\n";
  }
  close_output(out, path);
}

RainfallForcing read_rain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError(path + ": cannot open file");
  }
  RainfallForcing forcing;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto tokens = split_ws(std::string_view(line).substr(0, hash));
    if (tokens.empty()) continue;
    double t = 0.0, mm_per_h = 0.0;
    if (tokens.size() != 2 || !parse_number(tokens[0], t) || !parse_number(tokens[1], mm_per_h)) {
      fail(path, line_no, "expected '<time [s]> <intensity [mm/h]>'");
    }
    if (mm_per_h < 0.0) {
      fail(path, line_no, "negative rain intensity");
    }
    if (!forcing.breakpoints.empty() && !(t > forcing.breakpoints.back().time)) {
      fail(path, line_no, "times must strictly increase");
    }
    forcing.breakpoints.push_back({t, mm_per_h * kMillimetresPerHour});
  }
  return forcing;
}

void write_snapshot(const FlowState& state, const Topography& topo, const StructuredGrid& grid,
                    const std::string& path, double t, double h_dry, const std::string& provenance) {
  auto out = open_output(path);
  out << "# t = " << format_double(t) << "\n";
  if (!provenance.empty()) {
    out << "# " << provenance << "\n";
  }
  out << "# x y h u v z h+z qx qy\n";
  std::string line;
  for (int j = 0; j < grid.ny; ++j) {
    if (j > 0) out << "\n";
    for (int i = 0; i < grid.nx; ++i) {
      const double h = state.h(i, j), qx = state.qx(i, j), qy = state.qy(i, j), z = topo.z(i, j);
      line.clear();
      for (double value : {grid.cell_x(i), grid.cell_y(j), h, primitive_velocity(h, qx, h_dry),
                           primitive_velocity(h, qy, h_dry), z, h + z, qx, qy}) {
        if (!line.empty()) line += ' ';
        line += format_double(value);
      }
      out << line << "\n";
    }
  }
  close_output(out, path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError(path + ": cannot open file");
  }
  Snapshot snap;
  std::string line;
  int line_no = 0;
  bool have_time = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("# t = ", 0) == 0 && !have_time) {
      if (!parse_number(std::string_view(line).substr(6), snap.time)) fail(path, line_no, "bad time header");
      have_time = true;
      continue;
    }
    if (!line.empty() && line[0] == '#') continue;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 9) fail(path, line_no, "expected 9 columns");
    double v[9];
    for (int k = 0; k < 9; ++k) {
      if (!parse_number(tokens[k], v[k])) fail(path, line_no, "bad value '" + std::string(tokens[k]) + "'");
    }
    snap.records.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
  }
  if (!have_time) fail(path, 1, "missing '# t = ' header");
  return snap;
}

void write_hydrograph(const std::vector<HydrographSample>& record, const std::string& path,
                      const std::string& provenance) {
  auto out = open_output(path);
  if (!provenance.empty()) {
    out << "# " << provenance << "\n";
  }
  out << "# t [s]  Q [m^3/s] (mean outlet discharge over the preceding output interval)\n";
  for (const auto& s : record) {
    out << format_double(s.t) << " " << format_double(s.discharge) << "\n";
  }
  close_output(out, path);
}

double write_mass_balance(const MassBalanceReport& report, const std::string& path,
                          const std::string& provenance) {
  auto out = open_output(path);
  if (!provenance.empty()) {
    out << "# " << provenance << "\n";
  }
  out << "# volumes in m^3\n"
      << "initial_volume " << format_double(report.initial) << "\n"
      << "rain_volume " << format_double(report.rain) << "\n"
      << "infiltrated_volume " << format_double(report.infiltrated) << "\n"
      << "outflow_left " << format_double(report.outflow[0]) << "\n"
      << "outflow_right " << format_double(report.outflow[1]) << "\n"
      << "outflow_bottom " << format_double(report.outflow[2]) << "\n"
      << "outflow_top " << format_double(report.outflow[3]) << "\n"
      << "final_volume " << format_double(report.final) << "\n"
      << "residual " << format_double(report.residual()) << "\n";
  close_output(out, path);
  return report.residual();
}

}  // namespace swof
