#pragma once

#include <optional>
#include <string>
#include <vector>

#include "casimir/geometry.hpp"
#include "casimir/pfa.hpp"
#include "casimir/stress.hpp"

namespace casimir {

enum class RunMode { Force, SweepShift, SweepEdge, Converge, Pfa, Validate };

std::string to_string(RunMode m);
// Throws ConfigError for unknown names.
RunMode parse_mode(const std::string& name);

struct SweepRange {
  double from = 0.0;
  double to = 0.0;
  double step = 0.0;
  // Explicit points; overrides from/to/step when non-empty.
  std::vector<double> values;

  // from, from + step, ... up to `to` inclusive (within step * 1e-9).
  std::vector<double> points() const;
};

struct RunConfig {
  GearConfig geometry;
  StressNumerics numerics;
  RunMode mode = RunMode::Force;
  SweepRange sweep;
  int converge_levels = 1;  // doublings per ladder
  pfa::Convention pfa_convention = pfa::Convention::Printed;
  // BEM value of the rectangular f_n used for the PFA normalization; computed
  // when absent.
  std::optional<double> pfa_f_n_rect;
  std::string output;     // empty: stdout
  std::string plot_data;  // optional two-column curve file
  bool timing = true;     // false writes 0 into wall_time_s for byte-stable CSV
  bool mode_set = false;

  // Throws ConfigError naming the offending key.
  void validate() const;
};

// Flat key=value lines, '#' comments, dotted keys. Unknown keys and malformed
// lines are ConfigErrors carrying the line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace casimir
