#include "casimir/pfa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "casimir/error.hpp"
#include "casimir/quadrature.hpp"

namespace casimir::pfa {
namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

void check_dims(double a, double h, double b) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("pfa: period a must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("pfa: gap b must be positive");
  if (!(h >= 0.0) || !std::isfinite(h)) throw ConfigError("pfa: depth h must be non-negative");
}

void check_edge(double a, double h, double size, const char* what) {
  const double limit = std::min(h, 0.5 * a);
  if (!(size > 0.0) || !(2.0 * size <= limit * (1.0 + 1e-12))) {
    std::ostringstream msg;
    msg << "pfa: " << what << " " << size << " out of range (need 0 < size, 2*size <= " << limit << ")";
    throw ConfigError(msg.str());
  }
}

double apply(double printed, double a, Convention c) { return c == Convention::DutyCycle ? printed * a : printed; }

}  // namespace

std::string to_string(Convention c) { return c == Convention::Printed ? "printed" : "duty_cycle"; }

Convention parse_convention(const std::string& name) {
  if (name == "printed") return Convention::Printed;
  if (name == "duty_cycle") return Convention::DutyCycle;
  throw ConfigError("unknown PFA convention '" + name + "' (expected printed or duty_cycle)");
}

PfaResult pfa_rect(double a, double h, double b, Convention c) {
  check_dims(a, h, b);
  const double printed = kPi2 / (480.0 * a) * (1.0 / std::pow(b, 4) + 1.0 / std::pow(b + 2.0 * h, 4));
  return {apply(printed, a, c), EdgeVariant::Rectangular, c, 0.0};
}

PfaResult pfa_chamfer(double a, double h, double b, double leg, Convention c) {
  check_dims(a, h, b);
  check_edge(a, h, leg, "chamfer leg");
  const double L = leg;
  const double d = b + 2.0 * h;
  const double bracket = 1.0 / std::pow(d - 2.0 * L, 3) - 1.0 / std::pow(d, 3) +
                         3.0 * (0.5 * a - 2.0 * L) / std::pow(b, 4) * (1.0 + std::pow(b / d, 4)) +
                         2.0 * L / (b * b * (b + 2.0 * L) * (b + 2.0 * L)) *
                             (4.0 * (b + L) * (b + L) / (b * (b + 2.0 * L)) - 1.0);
  const double printed = kPi2 / (720.0 * a * a) * bracket;
  return {apply(printed, a, c), EdgeVariant::Chamfer, c, 0.0};
}

PfaResult pfa_fillet(double a, double h, double b, double radius, Convention c, double quad_tol) {
  check_dims(a, h, b);
  check_edge(a, h, radius, "fillet radius");
  if (!(quad_tol > 0.0)) throw DomainError("pfa_fillet: quad_tol must be positive");
  const double R = radius;
  // Depth of the arc below the flat at distance y from the arc's end.
  auto sag = [R](double y) { return R - std::sqrt(std::max(0.0, R * R - (R - y) * (R - y))); };
  const double near = quad::integrate_adaptive([&](double y) { return std::pow(b + 2.0 * sag(y), -4); },
                                               0.0, R, quad_tol).value;
  const double far = quad::integrate_adaptive([&](double y) { return std::pow(b + 2.0 * h - 2.0 * sag(y), -4); },
                                              0.0, R, quad_tol).value;
  const double flat = 0.5 * a - 2.0 * R;
  const double bracket = flat / std::pow(b, 4) + 2.0 * near + flat / std::pow(b + 2.0 * h, 4) + 2.0 * far;
  const double printed = kPi2 / (240.0 * a * a) * bracket;
  return {apply(printed, a, c), EdgeVariant::Fillet, c, 0.0};
}

PfaResult pfa_for(const GearConfig& config, Convention c) {
  switch (config.edge.variant) {
    case EdgeVariant::Chamfer:
      return pfa_chamfer(config.a, config.h, config.b, config.edge.size, c);
    case EdgeVariant::Fillet:
      return pfa_fillet(config.a, config.h, config.b, config.edge.size, c);
    case EdgeVariant::Rectangular:
      break;
  }
  return pfa_rect(config.a, config.h, config.b, c);
}

double normalize(double f_n_rect, double pfa_rect_value, double pfa_edge_value) {
  if (!(f_n_rect > 0.0) || !(pfa_rect_value > 0.0) || !(pfa_edge_value > 0.0)) {
    throw DomainError("pfa::normalize: inputs must be positive");
  }
  return f_n_rect / pfa_rect_value * pfa_edge_value;
}

}  // namespace casimir::pfa
