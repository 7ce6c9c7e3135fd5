#include <doctest.h>

#include <cmath>
#include <numbers>

#include "casimir/error.hpp"
#include "casimir/reference.hpp"
#include "casimir/stress.hpp"

using namespace casimir;

namespace {

constexpr double kFlat = 0.0411233516712056609;

// Cheap numerics for property checks: correct to a few 1e-4.
StressNumerics coarse() {
  StressNumerics n;
  n.density = 10.0;
  n.n_buffer = 6;
  n.spectral_nodes = 12;
  n.n_y = 32;
  n.estimate_error = false;
  return n;
}

GearConfig rack(double s, EdgeSpec edge = {}) {
  GearConfig g;
  g.s = s;
  g.edge = edge;
  return g;
}

}  // namespace

TEST_CASE("spectral grid integrates exponentially decaying integrands") {
  const auto grid = make_spectral_grid(32, 1.0, 0.0, std::numeric_limits<double>::infinity());
  double sum = 0.0;
  for (int i = 0; i < grid.size(); ++i) sum += grid.weights[i] * grid.nodes[i] * std::exp(-2.0 * grid.nodes[i]);
  CHECK(sum == doctest::Approx(0.25).epsilon(1e-10));
  for (int i = 0; i + 1 < grid.size(); ++i) CHECK(grid.nodes[i] < grid.nodes[i + 1]);
  for (double w : grid.weights) CHECK(w > 0.0);
}

TEST_CASE("spectral grid honours its interval") {
  const auto grid = make_spectral_grid(8, 2.0, 0.1, 20.0);
  CHECK(grid.nodes.front() > 0.1);
  CHECK(grid.nodes.back() < 20.0);
  double sum = 0.0;
  for (int i = 0; i < grid.size(); ++i) sum += grid.weights[i] * std::exp(-grid.nodes[i]);
  CHECK(sum == doctest::Approx(std::exp(-0.1) - std::exp(-20.0)).epsilon(1e-5));
  CHECK_THROWS_AS(make_spectral_grid(0, 1.0, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(make_spectral_grid(4, 1.0, 2.0, 1.0), ConfigError);
}

TEST_CASE("flat plates through the spectral machinery") {
  const auto fine = make_spectral_grid(32, 1.0, 0.0, 30.0);
  CHECK(flat_force(1.0, std::nullopt, fine) == doctest::Approx(kFlat).epsilon(1e-8));
  CHECK(flat_force(1.0, Polarization::Dirichlet, fine) == doctest::Approx(0.5 * kFlat).epsilon(1e-8));
  CHECK(flat_force(1.0, std::nullopt, fine) == doctest::Approx(reference::flat_casimir(1.0)).epsilon(1e-8));
  // Default grid.
  CHECK(flat_force(1.0) == doctest::Approx(kFlat).epsilon(2e-6));
  CHECK(flat_force(2.0) == doctest::Approx(kFlat / 16.0).epsilon(2e-6));
}

TEST_CASE("stress kernels need mixed derivatives") {
  GreenDerivatives g;
  g.value = 1.0;
  CHECK_THROWS_AS(stress_kernels({0.5, 0.0}, 1.0, Polarization::Dirichlet, g), UsageError);
  g.mixed = std::array<double, 4>{2.0, 0.5, 0.25, 1.0};
  const auto s = stress_kernels({0.5, 0.0}, 1.0, Polarization::Dirichlet, g);
  CHECK(s.s_n == doctest::Approx(kStressConstant * (2.0 - 1.0 - 1.0)));
  CHECK(s.s_tau == doctest::Approx(kStressConstant * 0.75));
}

TEST_CASE("stress line sits inside the gap") {
  StressNumerics n;
  n.n_y = 8;
  const auto nodes = stress_line_nodes(rack(0.0), n);
  REQUIRE(nodes.size() == 8);
  CHECK(nodes[0].x == doctest::Approx(0.5));
  CHECK(nodes[0].y == doctest::Approx(-1.0 + 0.125));
  CHECK(nodes[7].y == doctest::Approx(1.0 - 0.125));
  n.x_w = 1.0;
  CHECK_THROWS_AS(stress_line_nodes(rack(0.0), n), DomainError);
}

TEST_CASE("flat plates through the boundary solver") {
  GearConfig g;
  g.h = 0.0;
  auto n = coarse();
  n.n_buffer = 16;
  const auto f = compute_force(g, n);
  CHECK(f.f_n == doctest::Approx(kFlat).epsilon(5e-4));
  CHECK(std::abs(f.f_tau) < 1e-8);
  CHECK(f.f_n_pol[0] == doctest::Approx(0.5 * kFlat).epsilon(5e-4));
}

TEST_CASE("force does not depend on the stress line position") {
  auto n = coarse();
  n.x_w = 0.3;
  const auto a = compute_force(rack(0.6), n);
  n.x_w = 0.7;
  const auto b = compute_force(rack(0.6), n);
  CHECK(a.f_n == doctest::Approx(b.f_n).epsilon(1e-4));
  CHECK(a.f_tau == doctest::Approx(b.f_tau).epsilon(1e-4));
}

TEST_CASE("shift symmetry of the rectangular rack") {
  const auto n = coarse();
  const auto zero = compute_force(rack(0.0), n);
  CHECK(std::abs(zero.f_tau) < 1e-9 * zero.f_n);
  const auto half = compute_force(rack(1.0), n);
  CHECK(std::abs(half.f_tau) < 1e-9 * half.f_n);
  const auto p = compute_force(rack(0.6), n);
  const auto m = compute_force(rack(1.4), n);
  CHECK(p.f_n == doctest::Approx(m.f_n).epsilon(1e-6));
  CHECK(p.f_tau == doctest::Approx(-m.f_tau).epsilon(1e-5));
  CHECK(std::abs(p.f_tau) > 1e-4);
}

TEST_CASE("lambda^-4 scaling") {
  auto n = coarse();
  const auto base = compute_force(rack(0.6, EdgeSpec::chamfer(0.08)), n);
  n.density = 5.0;
  n.grading = 0.25;
  const auto big = compute_force(rack(0.6, EdgeSpec::chamfer(0.08)).scaled(2.0), n);
  CHECK(16.0 * big.f_n == doctest::Approx(base.f_n).epsilon(1e-3));
  CHECK(16.0 * big.f_tau == doctest::Approx(base.f_tau).epsilon(1e-3));
}

TEST_CASE("results do not depend on the worker count") {
  auto n = coarse();
  n.n_buffer = 2;
  n.spectral_nodes = 6;
  const auto one = compute_force(rack(0.6), n);
  n.workers = 3;
  const auto three = compute_force(rack(0.6), n);
  CHECK(one.f_n == three.f_n);
  CHECK(one.f_tau == three.f_tau);
}

TEST_CASE("error estimate is non-negative and small") {
  auto n = coarse();
  n.estimate_error = true;
  const auto f = compute_force(rack(0.6), n);
  CHECK(f.err_estimate >= 0.0);
  CHECK(f.err_estimate < 1e-2);
}

TEST_CASE("numerics validation") {
  StressNumerics n;
  n.density = 0.0;
  CHECK_THROWS_AS(n.validate(), ConfigError);
  n = {};
  n.spectral_nodes = 0;
  CHECK_THROWS_AS(n.validate(), ConfigError);
  n = {};
  n.corner_levels = -1;
  CHECK_THROWS_AS(n.validate(), ConfigError);
}
