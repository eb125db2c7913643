#include "swof/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "swof/errors.hpp"

namespace swof {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string where(const std::string& key, const ConfigEntry& e) {
  return (e.line > 0 ? "line " + std::to_string(e.line) : std::string("--set")) + ": key '" + key + "': ";
}

/// Typed accessor over the raw entries; remembers which keys were consumed.
class Reader {
 public:
  explicit Reader(const ConfigEntries& entries) : entries_(entries) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  const ConfigEntry* find(const std::string& key) {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  double number(const std::string& key, double fallback) {
    const ConfigEntry* e = find(key);
    if (!e) return fallback;
    double v = 0.0;
    std::string_view text = e->value;
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v)) {
      throw ConfigError(where(key, *e) + "cannot parse '" + e->value + "' as a number");
    }
    return v;
  }

  int integer(const std::string& key, int fallback) {
    const double v = number(key, fallback);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
      throw ConfigError(where(key, *find(key)) + "expected an integer, got '" + find(key)->value + "'");
    }
    return static_cast<int>(v);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const ConfigEntry* e = find(key);
    return e ? e->value : fallback;
  }

  /// Runs `check` and re-throws its ConfigError with the key's location.
  template <class F>
  void checked(const std::string& key, F&& check) {
    try {
      check();
    } catch (const ConfigError& err) {
      const ConfigEntry* e = find(key);
      throw ConfigError(e ? where(key, *e) + err.what() : std::string(err.what()));
    }
  }

 private:
  const ConfigEntries& entries_;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "dem_file",       "t_end",         "output_interval", "g",
      "order",          "cfl",           "dt_max",          "h_dry",
      "friction",       "friction_coefficient", "infiltration", "Ks",
      "hf",             "dtheta",        "rain_file",       "boundary_left",
      "boundary_right", "boundary_bottom", "boundary_top",  "initial_depth",
      "initial_depth_file", "initial_surface", "output_dir", "outlet",
      "threads",        "max_retries"};
  return keys;
}

}  // namespace

std::string SimulationConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ConfigEntries read_config_entries(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError(path + ": cannot open file");
  }
  ConfigEntries entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    if (entries.count(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' given twice");
    }
    entries[key] = {value, line_no};
  }
  return entries;
}

void apply_override(ConfigEntries& entries, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("--set expects key=value, got '" + std::string(assignment) + "'");
  }
  const std::string key(trim(assignment.substr(0, eq)));
  const std::string value(trim(assignment.substr(eq + 1)));
  if (key.empty() || value.empty()) {
    throw ConfigError("--set expects key=value, got '" + std::string(assignment) + "'");
  }
  entries[key] = {value, 0};
}

SimulationConfig build_config(const ConfigEntries& entries) {
  const auto& keys = known_keys();
  for (const auto& [key, entry] : entries) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(where(key, entry) + "unknown key");
    }
  }
  for (const char* mandatory : {"dem_file", "t_end"}) {
    if (!entries.count(mandatory)) {
      throw ConfigError(std::string("missing mandatory key '") + mandatory + "'");
    }
  }

  Reader r(entries);
  SimulationConfig c;
  c.dem_file = r.text("dem_file", "");
  c.t_end = r.number("t_end", 0.0);
  r.checked("t_end", [&] {
    if (!(c.t_end > 0.0)) throw ConfigError("t_end must be > 0");
  });
  c.output_interval = r.number("output_interval", c.t_end);
  r.checked("output_interval", [&] {
    if (!(c.output_interval > 0.0)) throw ConfigError("output_interval must be > 0");
  });

  StepConfig& s = c.step;
  s.constants.g = r.number("g", 9.81);
  r.checked("g", [&] {
    if (!(s.constants.g > 0.0)) throw ConfigError("g must be > 0");
  });
  s.h_dry = r.number("h_dry", kDefaultDryDepth);
  r.checked("h_dry", [&] {
    if (!(s.h_dry > 0.0)) throw ConfigError("h_dry must be > 0");
  });
  const int order = r.integer("order", 2);
  r.checked("order", [&] {
    if (order != 1 && order != 2) throw ConfigError("order must be 1 or 2");
  });
  s.cfl = CflSettings::defaults_for(order);
  s.cfl.n_cfl = r.number("cfl", s.cfl.n_cfl);
  r.checked("cfl", [&] {
    if (!(s.cfl.n_cfl > 0.0 && s.cfl.n_cfl <= 1.0)) throw ConfigError("cfl must be in (0, 1]");
  });
  s.cfl.dt_max = r.number("dt_max", s.cfl.dt_max);
  r.checked("dt_max", [&] {
    if (!(s.cfl.dt_max > 0.0)) throw ConfigError("dt_max must be > 0");
  });

  r.checked("friction", [&] { s.friction.kind = parse_friction_kind(r.text("friction", "none")); });
  if (s.friction.kind != FrictionKind::none) {
    if (!r.has("friction_coefficient")) {
      throw ConfigError(where("friction", *r.find("friction")) + "requires friction_coefficient");
    }
    s.friction.coefficient = r.number("friction_coefficient", 0.0);
    r.checked("friction_coefficient", [&] {
      if (!(s.friction.coefficient >= 0.0)) throw ConfigError("friction_coefficient must be >= 0");
    });
  }

  const std::string infiltration = r.text("infiltration", "none");
  if (infiltration == "greenampt") {
    for (const char* dep : {"Ks", "hf", "dtheta"}) {
      if (!r.has(dep)) {
        throw ConfigError(where("infiltration", *r.find("infiltration")) + "greenampt requires " + dep);
      }
    }
    s.infiltration = true;
    s.soil.Ks = r.number("Ks", 0.0);
    s.soil.hf = r.number("hf", 0.0);
    s.soil.dtheta = r.number("dtheta", 1.0);
    r.checked("Ks", [&] {
      if (!(s.soil.Ks >= 0.0)) throw ConfigError("Ks must be >= 0");
    });
    r.checked("hf", [&] {
      if (!(s.soil.hf >= 0.0)) throw ConfigError("hf must be >= 0");
    });
    r.checked("dtheta", [&] {
      if (!(s.soil.dtheta > 0.0 && s.soil.dtheta <= 1.0)) throw ConfigError("dtheta must be in (0, 1]");
    });
  } else if (infiltration != "none") {
    throw ConfigError(where("infiltration", *r.find("infiltration")) + "expected greenampt or none");
  }

  const std::pair<const char*, Side> sides[] = {{"boundary_left", Side::left},
                                                {"boundary_right", Side::right},
                                                {"boundary_bottom", Side::bottom},
                                                {"boundary_top", Side::top}};
  for (const auto& [key, side] : sides) {
    r.checked(key, [&, side = side, key = key] { s.boundaries[side] = parse_boundary_kind(r.text(key, "wall")); });
  }
  r.checked("boundary_left", [&] { s.boundaries.validate(); });

  s.cfl.max_retries = r.integer("max_retries", s.cfl.max_retries);
  r.checked("max_retries", [&] {
    if (s.cfl.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  });

  s.threads = r.integer("threads", 1);
  r.checked("threads", [&] {
    if (s.threads < 1) throw ConfigError("threads must be >= 1");
  });

  int initial_keys = 0;
  if (r.has("initial_depth")) {
    ++initial_keys;
    c.initial = {InitialKind::uniform_depth, r.number("initial_depth", 0.0), {}};
    r.checked("initial_depth", [&] {
      if (!(c.initial.value >= 0.0)) throw ConfigError("initial_depth must be >= 0");
    });
  }
  if (r.has("initial_depth_file")) {
    ++initial_keys;
    c.initial = {InitialKind::depth_file, 0.0, r.text("initial_depth_file", "")};
  }
  if (r.has("initial_surface")) {
    ++initial_keys;
    c.initial = {InitialKind::surface_level, r.number("initial_surface", 0.0), {}};
  }
  if (initial_keys > 1) {
    throw ConfigError("initial_depth, initial_depth_file and initial_surface are mutually exclusive");
  }

  c.rain_file = r.text("rain_file", "");
  c.output_dir = r.text("output_dir", "output");
  const std::string outlet = r.text("outlet", "none");
  if (outlet != "none") {
    r.checked("outlet", [&] { c.outlet = parse_side(outlet); });
  }

  for (const auto& [key, file] : {std::pair<std::string, std::string>{"dem_file", c.dem_file},
                                  {"rain_file", c.rain_file},
                                  {"initial_depth_file", c.initial.path}}) {
    if (!file.empty() && !std::filesystem::exists(file)) {
      throw ConfigError(where(key, *r.find(key)) + "file not found: " + file);
    }
  }

  std::ostringstream canonical;
  for (const auto& [key, entry] : entries) {
    canonical << key << " = " << entry.value << "\n";
  }
  c.canonical = canonical.str();
  return c;
}

SimulationConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  ConfigEntries entries = read_config_entries(path);
  for (const auto& o : overrides) {
    apply_override(entries, o);
  }
  return build_config(entries);
}

SimulationInputs load_inputs(const SimulationConfig& config) {
  SimulationInputs in;
  const DemGrid dem = read_dem(config.dem_file);
  in.grid = dem.grid();
  in.topography.z = dem.to_field();
  in.initial = FlowState(in.grid);
  switch (config.initial.kind) {
    case InitialKind::uniform_depth:
      in.initial.h.fill_interior(config.initial.value);
      break;
    case InitialKind::depth_file: {
      const DemGrid depth = read_dem(config.initial.path);
      if (depth.ncols != dem.ncols || depth.nrows != dem.nrows) {
        throw ConfigError("initial_depth_file: dimensions differ from dem_file");
      }
      for (int j = 0; j < dem.nrows; ++j) {
        for (int i = 0; i < dem.ncols; ++i) {
          if (depth.at(i, j) < 0.0) {
            throw ConfigError("initial_depth_file: negative depth at column " + std::to_string(i) + ", row " +
                              std::to_string(j));
          }
          in.initial.h(i, j) = depth.at(i, j);
        }
      }
      break;
    }
    case InitialKind::surface_level:
      for (int j = 0; j < dem.nrows; ++j) {
        for (int i = 0; i < dem.ncols; ++i) {
          in.initial.h(i, j) = std::max(config.initial.value - dem.at(i, j), 0.0);
        }
      }
      break;
  }
  if (!config.rain_file.empty()) {
    in.rain = read_rain_file(config.rain_file);
  }
  return in;
}

}  // namespace swof
