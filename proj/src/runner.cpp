#include "casimir/runner.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "casimir/error.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/reference.hpp"
#include "casimir/specfun.hpp"

namespace casimir {
namespace {

const std::vector<std::string> kForceColumns = {"f_n", "f_tau", "err_estimate", "f_n_dirichlet",
                                                "f_n_neumann", "wall_time_s", "status"};

std::vector<std::string> force_row(double x, const RunConfig& config, const GearConfig& g,
                                   const StressNumerics& numerics) {
  std::vector<std::string> row{format_number(x)};
  try {
    const auto f = compute_force(g, numerics);
    for (double v : {f.f_n, f.f_tau, f.err_estimate, f.f_n_pol[0], f.f_n_pol[1]}) row.push_back(format_number(v));
    row.push_back(format_number(config.timing ? f.wall_time_s : 0.0));
    row.push_back("ok");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    row.resize(1 + kForceColumns.size() - 1, "");
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    row.push_back("error: " + msg);
  }
  return row;
}

double rel(double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b); }

CheckResult make_check(std::string name, double value, double reference, double tolerance, bool relative = true) {
  CheckResult c{std::move(name), value, reference, 0.0, tolerance, false};
  c.error = relative ? rel(value, reference) : std::abs(value - reference);
  c.passed = c.error <= tolerance;
  return c;
}

// Flat conductor x <= 0 truncated at |y| <= half and backed at x = -depth.
std::vector<BoundarySegment> slab(double x0, double depth, double half, Plate plate, int side) {
  auto line = [&](Vec2 a, Vec2 b, bool closure) {
    BoundarySegment s;
    s.start = a;
    s.end = b;
    s.plate = plate;
    s.normal_sign = side;
    s.closure = closure;
    return s;
  };
  // side -1: vacuum at x > x0 (lower plate); +1: vacuum at x < x0.
  const double back = x0 + (side < 0 ? -depth : depth);
  return {line({x0, -half}, {x0, half}, false), line({x0, half}, {back, half}, true),
          line({back, half}, {back, -half}, true), line({back, -half}, {x0, -half}, true)};
}

LayerSolution solve_for(const std::vector<BoundarySegment>& segments, double kappa, double density,
                        Polarization pol, Vec2 source) {
  MeshGrading grading{0.5, 2.0, 0};
  auto mesh = std::make_shared<const BoundaryMesh>(discretize(segments, density, 0.0, grading));
  const auto sys = assemble(mesh, kappa, pol);
  return solve(sys, make_source_rhs(sys, {source}, false));
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string CsvTable::str() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

CsvTable run_force(const RunConfig& config) {
  CsvTable t;
  t.header = {"s"};
  t.header.insert(t.header.end(), kForceColumns.begin(), kForceColumns.end());
  const GearConfig g = config.geometry.validated();
  t.rows.push_back(force_row(g.s, config, g, config.numerics));
  return t;
}

CsvTable run_sweep(const RunConfig& config) {
  const bool edge = config.mode == RunMode::SweepEdge;
  if (!edge && config.mode != RunMode::SweepShift) throw UsageError("run_sweep: mode must be a sweep");
  CsvTable t;
  t.header = {edge ? "edge_size" : "s"};
  t.header.insert(t.header.end(), kForceColumns.begin(), kForceColumns.end());
  for (double x : config.sweep.points()) {
    GearConfig g = config.geometry;
    if (edge) {
      g.edge.size = x;
      if (x == 0.0) g.edge = EdgeSpec::rectangular();
    } else {
      g.s = x;
    }
    t.rows.push_back(force_row(x, config, g.validated(), config.numerics));
  }
  return t;
}

ConvergeResult run_converge(const RunConfig& config) {
  const GearConfig g = config.geometry.validated();
  ConvergeResult out;
  out.table.header = {"ladder", "density", "n_buffer", "spectral_nodes", "f_n", "f_tau",
                      "rel_change_f_n", "rel_change_f_tau", "wall_time_s"};
  StressNumerics base = config.numerics;
  base.estimate_error = false;
  const ForceDensity f0 = compute_force(g, base);
  auto row = [&](const std::string& name, const StressNumerics& n, const ForceDensity& f, const std::string& dn,
                 const std::string& dt) {
    out.table.rows.push_back({name, format_number(n.density), std::to_string(n.n_buffer),
                              std::to_string(n.spectral_nodes), format_number(f.f_n), format_number(f.f_tau), dn, dt,
                              format_number(config.timing ? f.wall_time_s : 0.0)});
  };
  row("base", base, f0, "", "");
  for (int ladder = 0; ladder < 3; ++ladder) {
    const char* name = ladder == 0 ? "density" : (ladder == 1 ? "n_buffer" : "spectral_nodes");
    StressNumerics n = base;
    ForceDensity prev = f0;
    double last = 0.0;
    for (int level = 0; level < config.converge_levels; ++level) {
      if (ladder == 0) n.density *= 2.0;
      if (ladder == 1) n.n_buffer = std::max(1, 2 * n.n_buffer);
      if (ladder == 2) n.spectral_nodes *= 2;
      const ForceDensity f = compute_force(g, n);
      // Tangential changes are measured on the scale of f_n, as f_tau
      // vanishes at symmetric shifts.
      const double dn = rel(f.f_n, prev.f_n);
      const double dt = std::abs(f.f_tau - prev.f_tau) / std::abs(prev.f_n);
      row(name, n, f, format_number(dn), format_number(dt));
      last = std::max(dn, dt);
      prev = f;
    }
    out.err_estimate = std::max(out.err_estimate, last);
  }
  return out;
}

CsvTable run_pfa(const RunConfig& config) {
  const GearConfig g = config.geometry.validated();
  double f_rect = 0.0;
  if (config.pfa_f_n_rect) {
    f_rect = *config.pfa_f_n_rect;
  } else {
    GearConfig rect = g;
    rect.s = 0.0;
    rect.edge = EdgeSpec::rectangular();
    f_rect = compute_force(rect, config.numerics).f_n;
  }
  CsvTable t;
  t.header = {"variant", "edge_size", "convention", "f_pfa_rect", "f_pfa", "normalization", "normalized", "f_n_rect"};
  for (auto c : {pfa::Convention::Printed, pfa::Convention::DutyCycle}) {
    const auto r = pfa::pfa_rect(g.a, g.h, g.b, c);
    const auto e = pfa::pfa_for(g, c);
    t.rows.push_back({to_string(g.edge.variant), format_number(g.edge.size), pfa::to_string(c),
                      format_number(r.f_pfa), format_number(e.f_pfa), format_number(f_rect / r.f_pfa),
                      format_number(pfa::normalize(f_rect, r.f_pfa, e.f_pfa)), format_number(f_rect)});
  }
  return t;
}

std::vector<CheckResult> check_image_oracle(double kappa, double density) {
  std::vector<CheckResult> out;
  const double half = 12.0 + 30.0 / kappa;
  const auto segs = slab(0.0, 6.0 + 20.0 / kappa, half, Plate::Lower, -1);
  const reference::FlatLine line{{0.0, 0.0}, {1.0, 0.0}};
  const Vec2 source{0.3, 0.1};
  const Vec2 target{0.6, -0.2};
  for (auto pol : kPolarizations) {
    const auto sol = solve_for(segs, kappa, density, pol, source);
    const auto got = eval_green(sol, 0, target, 1);
    const double want = reference::image_green(line, source, target, kappa, pol);
    // Image gradient by central differences of the oracle.
    const double h = 1e-5;
    const double gx = (reference::image_green(line, source, target + Vec2{h, 0.0}, kappa, pol) -
                       reference::image_green(line, source, target - Vec2{h, 0.0}, kappa, pol)) / (2.0 * h);
    out.push_back(make_check("image_value_" + to_string(pol), got.value, want, 1e-4));
    out.push_back(make_check("image_grad_x_" + to_string(pol), got.grad_target.x, gx, 1e-4));
  }
  return out;
}

std::vector<CheckResult> check_parallel_oracle(double kappa, double b, double density) {
  std::vector<CheckResult> out;
  const double half = 12.0 * b + 30.0 / kappa;
  const double depth = 6.0 * b + 20.0 / kappa;
  auto segs = slab(0.0, depth, half, Plate::Lower, -1);
  const auto upper = slab(b, depth, half, Plate::Upper, +1);
  segs.insert(segs.end(), upper.begin(), upper.end());
  const Vec2 source{0.3 * b, 0.0};
  const Vec2 target{0.6 * b, 0.25 * b};
  for (auto pol : kPolarizations) {
    const auto sol = solve_for(segs, kappa, density, pol, source);
    const double got = eval_green(sol, 0, target, 0).value;
    // g = -int dk/(2 pi) cos(k dy) G1D_ren(sqrt(kappa^2 + k^2)); the 1D
    // kernel uses the opposite sign convention.
    const double dy = target.y - source.y;
    auto integrand = [&](double u) {
      const double k = u / (1.0 - u);
      const double gamma = std::hypot(kappa, k);
      return std::cos(k * dy) * reference::flat_green_1d_ren(target.x, source.x, gamma, b, pol) / ((1.0 - u) * (1.0 - u));
    };
    const double want = -quad::integrate_adaptive(integrand, 0.0, 1.0, 1e-11, 1e-14, 20000).value / std::numbers::pi;
    out.push_back(make_check("parallel_value_" + to_string(pol), got, want, 1e-4));
  }
  return out;
}

bool ValidationReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return !checks.empty();
}

CsvTable ValidationReport::table() const {
  CsvTable t;
  t.header = {"check", "value", "reference", "error", "tolerance", "status"};
  for (const auto& c : checks) {
    t.rows.push_back({c.name, format_number(c.value), format_number(c.reference), format_number(c.error),
                      format_number(c.tolerance), c.passed ? "pass" : "FAIL"});
  }
  return t;
}

ValidationReport run_validate(const RunConfig& config) {
  ValidationReport report;
  const GearConfig g = config.geometry.validated();
  const double exact = reference::flat_casimir(g.b);

  report.checks.push_back(make_check("flat_spectral", flat_force(g.b), exact, 1e-6));

  GearConfig flat = g;
  flat.h = 0.0;
  flat.s = 0.0;
  flat.edge = EdgeSpec::rectangular();
  StressNumerics n = config.numerics;
  n.estimate_error = false;
  const auto ff = compute_force(flat, n);
  report.checks.push_back(make_check("flat_bem_f_n", ff.f_n, exact, 1e-4));
  report.checks.push_back(make_check("flat_bem_f_tau", ff.f_tau, 0.0, 1e-6 * exact, false));

  for (auto& c : check_image_oracle(1.0, 20.0)) report.checks.push_back(c);
  for (auto& c : check_parallel_oracle(1.0, g.b, 20.0)) report.checks.push_back(c);

  // Rectangular profile: no lateral force at s = 0 and s = a/2.
  GearConfig rect = g;
  rect.edge = EdgeSpec::rectangular();
  StressNumerics ne = config.numerics;
  ne.estimate_error = true;
  for (double s : {0.0, 0.5 * g.a}) {
    rect.s = s;
    const auto f = compute_force(rect, ne);
    const double tol = std::max(2.0 * f.err_estimate * f.f_n, 1e-12);
    report.checks.push_back(make_check("symmetry_f_tau_s=" + format_number(s), f.f_tau, 0.0, tol, false));
  }

  // Stress conservation: the force does not depend on where W crosses the gap.
  GearConfig shifted = g;
  if (shifted.s == 0.0) shifted.s = 0.3 * g.a;
  shifted = shifted.validated();
  StressNumerics nw = n;
  nw.x_w = 0.3 * g.b;
  const auto f3 = compute_force(shifted, nw);
  nw.x_w = 0.7 * g.b;
  const auto f7 = compute_force(shifted, nw);
  report.checks.push_back(make_check("w_line_f_n", f7.f_n, f3.f_n, 1e-3));
  report.checks.push_back(make_check("w_line_f_tau", f7.f_tau, f3.f_tau, 1e-3));
  return report;
}

std::string plot_data(const CsvTable& table, const std::vector<std::string>& curves) {
  std::ostringstream out;
  for (const auto& name : curves) {
    std::size_t col = 0;
    while (col < table.header.size() && table.header[col] != name) ++col;
    if (col == table.header.size()) throw UsageError("plot_data: no column '" + name + "'");
    out << "# " << table.header[0] << " " << name << '\n';
    for (const auto& r : table.rows) {
      if (!r[col].empty()) out << r[0] << ' ' << r[col] << '\n';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace casimir
