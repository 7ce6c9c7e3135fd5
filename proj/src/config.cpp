#include "casimir/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "casimir/error.hpp"

namespace casimir {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& v) {
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw ConfigError("expected a comma-separated list of numbers");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"mode", [](RunConfig& c, const std::string& v) { c.mode = parse_mode(v); c.mode_set = true; }},
      {"geometry.a", [](RunConfig& c, const std::string& v) { c.geometry.a = to_double(v); }},
      {"geometry.h", [](RunConfig& c, const std::string& v) { c.geometry.h = to_double(v); }},
      {"geometry.b", [](RunConfig& c, const std::string& v) { c.geometry.b = to_double(v); }},
      {"geometry.s", [](RunConfig& c, const std::string& v) { c.geometry.s = to_double(v); }},
      {"geometry.duty", [](RunConfig& c, const std::string& v) { c.geometry.duty = to_double(v); }},
      {"edge.variant", [](RunConfig& c, const std::string& v) { c.geometry.edge.variant = parse_edge_variant(v); }},
      {"edge.size", [](RunConfig& c, const std::string& v) { c.geometry.edge.size = to_double(v); }},
      {"numerics.density", [](RunConfig& c, const std::string& v) { c.numerics.density = to_double(v); }},
      {"numerics.n_buffer", [](RunConfig& c, const std::string& v) { c.numerics.n_buffer = to_int(v); }},
      {"numerics.n_y", [](RunConfig& c, const std::string& v) { c.numerics.n_y = to_int(v); }},
      {"numerics.spectral_nodes", [](RunConfig& c, const std::string& v) { c.numerics.spectral_nodes = to_int(v); }},
      {"numerics.kappa_min", [](RunConfig& c, const std::string& v) { c.numerics.kappa_min = to_double(v); }},
      {"numerics.kappa_max", [](RunConfig& c, const std::string& v) { c.numerics.kappa_max = to_double(v); }},
      {"numerics.oversampling", [](RunConfig& c, const std::string& v) { c.numerics.oversampling = to_int(v); }},
      {"numerics.x_w", [](RunConfig& c, const std::string& v) { c.numerics.x_w = to_double(v); }},
      {"numerics.grading", [](RunConfig& c, const std::string& v) { c.numerics.grading = to_double(v); }},
      {"numerics.fine_periods", [](RunConfig& c, const std::string& v) { c.numerics.fine_periods = to_double(v); }},
      {"numerics.corner_levels", [](RunConfig& c, const std::string& v) { c.numerics.corner_levels = to_int(v); }},
      {"numerics.arc_factor", [](RunConfig& c, const std::string& v) { c.numerics.arc_factor = to_double(v); }},
      {"numerics.estimate_error", [](RunConfig& c, const std::string& v) { c.numerics.estimate_error = to_bool(v); }},
      {"numerics.workers", [](RunConfig& c, const std::string& v) { c.numerics.workers = to_int(v); }},
      {"sweep.from", [](RunConfig& c, const std::string& v) { c.sweep.from = to_double(v); }},
      {"sweep.to", [](RunConfig& c, const std::string& v) { c.sweep.to = to_double(v); }},
      {"sweep.step", [](RunConfig& c, const std::string& v) { c.sweep.step = to_double(v); }},
      {"sweep.values", [](RunConfig& c, const std::string& v) { c.sweep.values = to_list(v); }},
      {"converge.levels", [](RunConfig& c, const std::string& v) { c.converge_levels = to_int(v); }},
      {"pfa.convention", [](RunConfig& c, const std::string& v) { c.pfa_convention = pfa::parse_convention(v); }},
      {"pfa.f_n_rect", [](RunConfig& c, const std::string& v) { c.pfa_f_n_rect = to_double(v); }},
      {"output.path", [](RunConfig& c, const std::string& v) { c.output = v; }},
      {"output.plot_data", [](RunConfig& c, const std::string& v) { c.plot_data = v; }},
      {"output.timing", [](RunConfig& c, const std::string& v) { c.timing = to_bool(v); }},
  };
  return table;
}

}  // namespace

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::Force: return "force";
    case RunMode::SweepShift: return "sweep_shift";
    case RunMode::SweepEdge: return "sweep_edge";
    case RunMode::Converge: return "converge";
    case RunMode::Pfa: return "pfa";
    case RunMode::Validate: return "validate";
  }
  return "?";
}

RunMode parse_mode(const std::string& name) {
  for (auto m : {RunMode::Force, RunMode::SweepShift, RunMode::SweepEdge, RunMode::Converge, RunMode::Pfa,
                 RunMode::Validate}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown mode '" + name + "'");
}

std::vector<double> SweepRange::points() const {
  if (!values.empty()) return values;
  if (!(step > 0.0)) throw ConfigError("sweep.step must be positive");
  if (!(to >= from)) throw ConfigError("sweep range is empty (sweep.to < sweep.from)");
  std::vector<double> out;
  const double n = std::floor((to - from) / step + 1e-9);
  for (int k = 0; k <= static_cast<int>(n); ++k) out.push_back(from + k * step);
  return out;
}

void RunConfig::validate() const {
  // An edge sweep supplies its own sizes.
  GearConfig base = geometry;
  if (mode == RunMode::SweepEdge) base.edge.size = 0.0;
  if (mode != RunMode::SweepEdge || base.edge.variant == EdgeVariant::Rectangular) (void)geometry.validated();
  else (void)GearConfig{base.a, base.h, base.b, base.s, EdgeSpec{}, base.duty}.validated();
  numerics.validate();
  if (numerics.corner_levels < 0) throw ConfigError("numerics.corner_levels must be non-negative");
  if (numerics.x_w && !(*numerics.x_w > 0.0 && *numerics.x_w < geometry.b)) {
    throw ConfigError("numerics.x_w must lie strictly inside the gap (0, b)");
  }
  if (mode == RunMode::SweepShift || mode == RunMode::SweepEdge) {
    if (sweep.values.empty() && !(sweep.step > 0.0)) throw ConfigError("sweep.step must be positive");
    (void)sweep.points();
    if (mode == RunMode::SweepEdge) {
      if (geometry.edge.variant == EdgeVariant::Rectangular) {
        throw ConfigError("edge.variant must be chamfer or fillet for sweep_edge");
      }
      for (double size : sweep.points()) {
        if (size < 0.0) throw ConfigError("sweep: edge sizes must be non-negative");
        if (size == 0.0) continue;
        GearConfig g = geometry;
        g.edge.size = size;
        (void)g.validated();
      }
    }
  }
  if (converge_levels < 1) throw ConfigError("converge.levels must be at least 1");
  if (pfa_f_n_rect && !(*pfa_f_n_rect > 0.0)) throw ConfigError("pfa.f_n_rect must be positive");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + "empty value for '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace casimir
