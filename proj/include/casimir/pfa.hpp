#pragma once

#include <string>

#include "casimir/geometry.hpp"

namespace casimir::pfa {

// Printed: the formulas as published, with their 1/a (rectangular) and 1/a^2
// (edge) prefactors. DutyCycle: the same times a, which gives the per-period
// density and reduces to pi^2/240 b^-4 for flat plates at any a.
enum class Convention { Printed, DutyCycle };

std::string to_string(Convention c);
Convention parse_convention(const std::string& name);

struct PfaResult {
  double f_pfa = 0.0;
  EdgeVariant variant = EdgeVariant::Rectangular;
  Convention convention = Convention::Printed;
  double normalized = 0.0;  // N f_pfa once normalize_result has been applied
};

inline constexpr double kDefaultQuadTol = 1e-10;

// pi^2 / (480 a) (b^-4 + (b + 2h)^-4). Throws ConfigError on invalid sizes.
PfaResult pfa_rect(double a, double h, double b, Convention c = Convention::Printed);

// Flat (45 degree) edges of leg L on all four corners of a period.
// Requires 0 < L and 2L <= min(h, a/2).
PfaResult pfa_chamfer(double a, double h, double b, double leg, Convention c = Convention::Printed);

// Rounded edges of radius R; the two arc integrals are done numerically.
// Same size limits as the chamfer. Throws NumericError if quadrature fails.
PfaResult pfa_fillet(double a, double h, double b, double radius, Convention c = Convention::Printed,
                     double quad_tol = kDefaultQuadTol);

// Dispatches on the edge of a rack configuration (its shift is ignored).
PfaResult pfa_for(const GearConfig& config, Convention c = Convention::Printed);

// (f_n_rect / pfa_rect) * pfa_edge. Throws DomainError unless all inputs > 0.
double normalize(double f_n_rect, double pfa_rect_value, double pfa_edge_value);

}  // namespace casimir::pfa
