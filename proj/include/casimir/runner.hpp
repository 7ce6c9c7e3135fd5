#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "casimir/bem.hpp"
#include "casimir/config.hpp"

namespace casimir {

// 12 significant digits, '.' decimal point.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Comma separated, LF line endings, header always present.
  std::string str() const;
};

// Columns: x, f_n, f_tau, err_estimate, f_n_dirichlet, f_n_neumann,
// wall_time_s, status; x is named s, edge_size or label. A failed point
// keeps its row with empty values and the error in status.
CsvTable run_force(const RunConfig& config);
CsvTable run_sweep(const RunConfig& config);

// Density, buffer and spectral-node ladders, each doubled converge_levels
// times from the configured values. rel_change is against the previous rung
// of the same ladder.
struct ConvergeResult {
  CsvTable table;
  double err_estimate = 0.0;  // max relative change over the last rungs
};
ConvergeResult run_converge(const RunConfig& config);

// PFA values under both conventions plus the normalized estimate.
CsvTable run_pfa(const RunConfig& config);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double error = 0.0;  // relative unless the check says otherwise
  double tolerance = 0.0;
  bool passed = false;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  CsvTable table() const;
};

// Boundary solution for one point source near a single flat conductor (a
// thick closed slab) against the image oracle: value and target gradient,
// relative to the value.
std::vector<CheckResult> check_image_oracle(double kappa, double density);
// Two flat conductors at distance b against the transverse integral of the
// 1D parallel-plate Green function.
std::vector<CheckResult> check_parallel_oracle(double kappa, double b, double density);

// Flat BEM, flat spectral machinery, oracle checks, symmetry and W-line
// independence on the configured geometry.
ValidationReport run_validate(const RunConfig& config);

// Two-column "x y" blocks per curve, blank line between curves.
std::string plot_data(const CsvTable& table, const std::vector<std::string>& curves);

}  // namespace casimir
