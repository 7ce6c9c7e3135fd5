#pragma once

#include "casimir/bem.hpp"
#include "casimir/vec2.hpp"

// Closed-form oracles for flat conductors. Kept free of the boundary solver
// and of the stress module's quadrature so they stay independent checks.
namespace casimir::reference {

struct FlatOracle {
  double b = 1.0;
  Polarization pol = Polarization::Dirichlet;
};

// Green function of d^2/dx^2 - gamma^2 between walls at x = 0 and x = b,
// negative convention (the free kernel is -exp(-gamma |x - x'|) / (2 gamma)).
// Throws DomainError for x or x' outside [0, b] or gamma <= 0.
double flat_green_1d(double x, double xp, double gamma, double b, Polarization pol);
// Same minus the free kernel; finite at x = x'.
double flat_green_1d_ren(double x, double xp, double gamma, double b, Polarization pol);

// Infinite straight conductor through `point`; `normal` points into vacuum.
struct FlatLine {
  Vec2 point{0.0, 0.0};
  Vec2 normal{1.0, 0.0};
};

// g_ren of the positive-convention kernel K0(kappa r) / (2 pi) for a single
// conducting line: -Phi(|target - source*|) (Dirichlet), +Phi (Neumann), with
// source* the mirror image. Throws DomainError for points behind the line.
double image_green(const FlatLine& line, Vec2 source, Vec2 target, double kappa, Polarization pol);

// Casimir force density between flat plates from the kappa and transverse
// wavenumber integrals of the 1D kernels, by nested adaptive quadrature.
double flat_casimir(const FlatOracle& oracle, double rel_tol = 1e-12);
// Both polarizations.
double flat_casimir(double b, double rel_tol = 1e-12);

}  // namespace casimir::reference
