#include "casimir/reference.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "casimir/error.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/specfun.hpp"

namespace casimir::reference {
namespace {

void check_gap(double x, double xp, double gamma, double b) {
  if (!(b > 0.0)) throw DomainError("flat_green_1d: gap must be positive");
  if (!(gamma > 0.0)) throw DomainError("flat_green_1d: gamma must be positive");
  if (!(x >= 0.0 && x <= b && xp >= 0.0 && xp <= b)) {
    std::ostringstream msg;
    msg << "flat_green_1d: points " << x << ", " << xp << " outside the gap [0, " << b << "]";
    throw DomainError(msg.str());
  }
}

// int_0^inf f(t) dt through t = u / (1 - u).
template <class F>
double half_line(F&& f, double rel_tol) {
  auto mapped = [&](double u) {
    const double v = 1.0 - u;
    return f(u / v) / (v * v);
  };
  return quad::integrate_adaptive(mapped, 0.0, 1.0, rel_tol, 1e-300).value;
}

}  // namespace

double flat_green_1d(double x, double xp, double gamma, double b, Polarization pol) {
  check_gap(x, xp, gamma, b);
  const double lo = std::min(x, xp);
  const double hi = std::max(x, xp);
  // Products of hyperbolic functions written with exponentials to stay
  // finite for large gamma b.
  const double e = std::exp(-gamma * (hi - lo));
  const double d1 = std::exp(-2.0 * gamma * lo);
  const double d2 = std::exp(-2.0 * gamma * (b - hi));
  const double denom = gamma * (1.0 - std::exp(-2.0 * gamma * b));
  if (pol == Polarization::Dirichlet) {
    return -0.5 * e * (1.0 - d1) * (1.0 - d2) / denom;
  }
  return -0.5 * e * (1.0 + d1) * (1.0 + d2) / denom;
}

double flat_green_1d_ren(double x, double xp, double gamma, double b, Polarization pol) {
  return flat_green_1d(x, xp, gamma, b, pol) + std::exp(-gamma * std::abs(x - xp)) / (2.0 * gamma);
}

double image_green(const FlatLine& line, Vec2 source, Vec2 target, double kappa, Polarization pol) {
  const Vec2 n = (1.0 / norm(line.normal)) * line.normal;
  const double hs = dot(source - line.point, n);
  const double ht = dot(target - line.point, n);
  if (hs < 0.0 || ht < 0.0) throw DomainError("image_green: point behind the conductor");
  if (!(kappa > 0.0)) throw DomainError("image_green: kappa must be positive");
  const Vec2 image = source - (2.0 * hs) * n;
  const double phi = bessel_k0(kappa * distance(target, image)) / (2.0 * std::numbers::pi);
  return pol == Polarization::Dirichlet ? -phi : phi;
}

double flat_casimir(const FlatOracle& oracle, double rel_tol) {
  const double b = oracle.b;
  if (!(b > 0.0)) throw DomainError("flat_casimir: gap must be positive");
  // Pressure of one scalar mode:
  //   (1 / 4 pi^2) int_0^inf kappa dkappa int_0^inf dk
  //       [(d_x d_x' - gamma^2) g1d_ren](x, x),  gamma^2 = kappa^2 + k^2,
  // with the derivatives of the closed form taken analytically; the mixed
  // derivative part is independent of x.
  auto integrand = [&](double kappa, double k) {
    const double gamma = std::hypot(kappa, k);
    if (gamma == 0.0) return 1.0 / (2.0 * b);  // limit of 2 gamma / (e^{2 gamma b} - 1)
    return 2.0 * gamma / std::expm1(2.0 * gamma * b);
  };
  // The same for both polarizations: the image terms that differ cancel
  // between d_x d_x' and -gamma^2.
  const double inner_tol = 0.1 * rel_tol;
  const double value = half_line(
      [&](double kappa) {
        if (kappa * b > 40.0) return 0.0;
        return kappa * half_line([&](double k) { return k * b > 40.0 ? 0.0 : integrand(kappa, k); }, inner_tol);
      },
      rel_tol);
  return value / (4.0 * std::numbers::pi * std::numbers::pi);
}

double flat_casimir(double b, double rel_tol) {
  return flat_casimir({b, Polarization::Dirichlet}, rel_tol) + flat_casimir({b, Polarization::Neumann}, rel_tol);
}

}  // namespace casimir::reference
