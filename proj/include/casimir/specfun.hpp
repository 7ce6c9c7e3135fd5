#pragma once

#include <array>

#include "casimir/vec2.hpp"

namespace casimir {

// Modified Bessel functions of the second kind, orders 0 and 1, for x > 0.
// Relative accuracy is about 1e-15 everywhere; beyond x ~ 700 the unscaled
// values underflow to zero and the *_scaled variants must be used.
double bessel_k0(double x);
double bessel_k1(double x);

// e^x K0(x) and e^x K1(x).
double bessel_k0_scaled(double x);
double bessel_k1_scaled(double x);

struct BesselK01 {
  double k0;
  double k1;
};

// Both orders at once; shares the logarithm / exponential between them.
BesselK01 bessel_k01(double x);

// Modified Bessel functions of the first kind; only used near the origin
// and by tests.
double bessel_i0(double x);
double bessel_i1(double x);

// Free-space fundamental solution of (-Laplace + kappa^2) in the plane,
// Phi(r) = K0(kappa r) / (2 pi), with derivatives taken with respect to the
// target point. Mixed source/target derivatives follow from translation
// invariance: d/dsource = -d/dtarget.
struct KernelValues {
  double phi = 0.0;
  Vec2 grad;
  // Row-major target/target second derivatives {xx, xy, yx, yy}.
  std::array<double, 4> hess{};
};

// order 0 fills phi, order 1 also grad, order 2 also hess.
// Throws DomainError for kappa <= 0 or coincident points.
KernelValues kernel(double kappa, Vec2 source, Vec2 target, int order);

}  // namespace casimir
