#include <doctest.h>

#include <cmath>

#include "casimir/bem.hpp"
#include "casimir/error.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/runner.hpp"
#include "casimir/specfun.hpp"

using namespace casimir;

namespace {

GearConfig rack(double s = 0.6, EdgeSpec edge = {}) {
  GearConfig g;
  g.s = s;
  g.edge = edge;
  return g;
}

std::shared_ptr<const BoundaryMesh> rack_mesh(double density, const GearConfig& g = rack()) {
  return std::make_shared<const BoundaryMesh>(build_mesh(g, density, 8, {0.5, 1.5 * g.a, 4}));
}

Element segment_element(Vec2 a, Vec2 b) {
  Element e;
  e.start = a;
  e.end = b;
  e.length = distance(a, b);
  e.midpoint = 0.5 * (a + b);
  e.tangent = (1.0 / e.length) * (b - a);
  e.normal = -1.0 * perp(e.tangent);
  return e;
}

// Brute-force tau^m moments, splitting at the foot point.
std::array<double, 3> brute(const Element& e, Vec2 x, double kappa, IntegralKind kind, Vec2 n) {
  std::array<double, 3> out{};
  for (int m = 0; m < 3; ++m) {
    auto f = [&](double s) {
      const Vec2 y = e.midpoint + s * e.tangent;
      const Vec2 d = x - y;
      const double r = norm(d);
      const double tau = s / e.length;
      double k = 0.0;
      if (kind == IntegralKind::Value) k = bessel_k0(kappa * r);
      if (kind == IntegralKind::NormalDerivative) k = -kappa * bessel_k1(kappa * r) * dot(d, n) / r;
      if (kind == IntegralKind::DoubleLayer) k = kappa * bessel_k1(kappa * r) * dot(d, e.normal) / r;
      return std::pow(tau, m) * k / (2.0 * std::numbers::pi);
    };
    const double foot = std::clamp(dot(x - e.midpoint, e.tangent), -0.5 * e.length, 0.5 * e.length);
    double v = 0.0;
    if (foot > -0.5 * e.length) v += quad::integrate_adaptive(f, -0.5 * e.length, foot, 1e-12, 1e-15, 20000).value;
    if (foot < 0.5 * e.length) v += quad::integrate_adaptive(f, foot, 0.5 * e.length, 1e-12, 1e-15, 20000).value;
    out[m] = v;
  }
  return out;
}

}  // namespace

TEST_CASE("element moments match brute-force quadrature near and far") {
  const auto e = segment_element({0.0, -0.05}, {0.02, 0.05});
  const Vec2 n{0.6, 0.8};
  for (Vec2 x : {Vec2{0.05, 0.01}, Vec2{0.004, 0.02}, Vec2{0.3, -0.4}, Vec2{0.0105, 0.0}}) {
    for (auto kind : {IntegralKind::Value, IntegralKind::NormalDerivative, IntegralKind::DoubleLayer}) {
      const auto got = element_moments(e, x, 1.3, kind, n);
      const auto want = brute(e, x, 1.3, kind, n);
      for (int m = 0; m < 3; ++m) {
        CAPTURE(m);
        CHECK(std::abs(got[m] - want[m]) <= 1e-7 * (std::abs(want[0]) + 1e-12));
      }
    }
  }
}

TEST_CASE("on-element value integral has the logarithmic closed form") {
  // Small kappa r: K0 ~ -log(kappa r / 2) - gamma_E; the midpoint integral is
  // checked against brute force with the singular split.
  const auto e = segment_element({0.0, -0.05}, {0.0, 0.05});
  const auto got = element_moments(e, e.midpoint, 0.7, IntegralKind::Value);
  const auto want = brute(e, e.midpoint, 0.7, IntegralKind::Value, {});
  CHECK(got[0] == doctest::Approx(want[0]).epsilon(1e-10));
  CHECK(std::abs(got[1]) < 1e-14);
}

TEST_CASE("BEM against the image oracle for one conductor") {
  for (double kappa : {0.5, 1.0, 3.0}) {
    for (const auto& c : check_image_oracle(kappa, 20.0)) {
      CAPTURE(c.name);
      CAPTURE(kappa);
      CHECK(c.error <= 1e-4);
    }
  }
}

TEST_CASE("BEM against the 1D oracle for parallel plates") {
  for (double kappa : {0.5, 1.0, 3.0}) {
    for (const auto& c : check_parallel_oracle(kappa, 1.0, 20.0)) {
      CAPTURE(c.name);
      CAPTURE(kappa);
      CHECK(c.error <= 1e-4);
    }
  }
}

TEST_CASE("field of a source inside a plate is reproduced exactly") {
  // Phi(x - s) with s inside the lower tooth is a valid exterior field; the
  // boundary solution must reproduce it in the gap.
  const double kappa = 0.5;
  const auto mesh = rack_mesh(20.0);
  const Vec2 inside{-0.3, 0.1};
  const auto both = assemble_both(mesh, kappa);
  for (const auto& sys : both) {
    LayerSolution sol;
    sol.mesh = mesh;
    sol.kappa = kappa;
    sol.pol = sys.polarization();
    if (sol.pol == Polarization::Dirichlet) {
      Eigen::MatrixXd rhs(sys.rows(), 1);
      for (int r = 0; r < sys.rows(); ++r) rhs(r, 0) = kernel(kappa, inside, sys.collocation_points()[r], 0).phi;
      sol.densities = solve_columns(sys, rhs);
    } else {
      Eigen::MatrixXd g(mesh->size(), 1);
      for (int j = 0; j < mesh->size(); ++j) {
        const auto& e = mesh->elements[j];
        g(j, 0) = dot(kernel(kappa, inside, e.midpoint, 1).grad, e.normal);
      }
      sol.densities = solve_columns(sys, -(sys.single_layer() * g));
      sol.boundary_flux = g;
    }
    for (Vec2 p : {Vec2{0.5, 0.1}, Vec2{0.5, 0.5}, Vec2{0.05, 0.5}}) {
      const auto row = evaluation_row(*mesh, kappa, p, 1);
      const auto f = apply_row(row, sol, 0);
      const auto k = kernel(kappa, inside, p, 1);
      CAPTURE(to_string(sol.pol));
      CHECK(f[0] == doctest::Approx(k.phi).epsilon(1e-4));
      CHECK(f[1] == doctest::Approx(k.grad.x).epsilon(1e-3));
    }
  }
}

TEST_CASE("renormalized Green function is reciprocal") {
  const double kappa = 0.8;
  const auto mesh = rack_mesh(20.0);
  const Vec2 u{0.3, 0.2}, v{0.7, -0.4};
  const auto both = assemble_both(mesh, kappa);
  for (const auto& sys : both) {
    const auto sol = solve(sys, make_source_rhs(sys, {u, v}, false));
    const double uv = eval_green(sol, 0, v, 0).value;
    const double vu = eval_green(sol, 1, u, 0).value;
    CAPTURE(to_string(sys.polarization()));
    CHECK(uv == doctest::Approx(vu).epsilon(1e-5));
  }
}

TEST_CASE("mixed derivatives from dipole sources match finite differences") {
  const double kappa = 1.0;
  const auto mesh = rack_mesh(20.0);
  const Vec2 u{0.5, 0.1};
  const double h = 1e-4;
  const auto both = assemble_both(mesh, kappa);
  for (const auto& sys : both) {
    const auto sol = solve(sys, make_source_rhs(sys, {u, u + Vec2{h, 0}, u - Vec2{h, 0}}, true));
    const auto at = eval_green(sol, 0, u, 2);
    REQUIRE(at.mixed.has_value());
    const double fd = (eval_green(sol, 1, u, 1).grad_target.x - eval_green(sol, 2, u, 1).grad_target.x) / (2 * h);
    CAPTURE(to_string(sys.polarization()));
    CHECK((*at.mixed)[0] == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("doubling the density changes g_ren by less than 1e-3 on the rack") {
  const double kappa = 0.7;
  const Vec2 u{0.5, 0.3};
  const Vec2 v{0.4, -0.2};
  for (auto pol : kPolarizations) {
    double prev = 0.0;
    for (double d : {10.0, 20.0}) {
      const auto sys = assemble(rack_mesh(d), kappa, pol);
      const auto sol = solve(sys, make_source_rhs(sys, {u}, false));
      CHECK(sol.max_relative_residual() < 1e-2);
      const double g = eval_green(sol, 0, v, 0).value;
      if (prev != 0.0) CHECK(std::abs(g - prev) <= 1e-3 * std::abs(g));
      prev = g;
    }
  }
}

TEST_CASE("misuse and domain errors") {
  const auto mesh = rack_mesh(5.0);
  CHECK_THROWS_AS(assemble(mesh, 0.0, Polarization::Dirichlet), DomainError);
  CHECK_THROWS_AS(assemble(nullptr, 1.0, Polarization::Dirichlet), Error);
  const auto sys = assemble(mesh, 1.0, Polarization::Dirichlet);
  CHECK_THROWS_AS(make_source_rhs(sys, {sys.collocation_points()[3]}, false), DomainError);
  const auto sol = solve(sys, make_source_rhs(sys, {{0.5, 0.0}}, false));
  CHECK_THROWS_AS(eval_green(sol, 0, {0.4, 0.0}, 2), UsageError);
  CHECK_THROWS_AS(eval_green(sol, 3, {0.4, 0.0}, 0), UsageError);
}
