#include <doctest.h>

#include <cmath>
#include <numbers>

#include "casimir/error.hpp"
#include "casimir/quadrature.hpp"

using namespace casimir;

TEST_CASE("Gauss-Legendre is exact up to degree 2n - 1") {
  for (int n : {1, 2, 5, 8, 16, 40}) {
    const auto& r = quad::gauss_legendre(n);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += r.weights[i] * std::pow(r.nodes[i], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      CHECK(std::abs(sum - exact) < 1e-14);
    }
  }
}

TEST_CASE("Gauss-Legendre nodes are increasing and symmetric") {
  const auto& r = quad::gauss_legendre(9);
  for (int i = 0; i + 1 < 9; ++i) CHECK(r.nodes[i] < r.nodes[i + 1]);
  for (int i = 0; i < 9; ++i) CHECK(std::abs(r.nodes[i] + r.nodes[8 - i]) < 1e-15);
}

TEST_CASE("adaptive integration of smooth and endpoint-singular integrands") {
  const auto e = quad::integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-13);
  CHECK(std::abs(e.value - (std::numbers::e - 1.0)) < 1e-13);
  const auto l = quad::integrate_adaptive([](double x) { return std::log(x); }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(l.value + 1.0) < 1e-11);
  const auto s = quad::integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
  CHECK(std::abs(s.value - 2.0) < 1e-9);
}

TEST_CASE("adaptive integration gives up with a numeric error") {
  CHECK_THROWS_AS(quad::integrate_adaptive([](double x) { return std::sin(1.0 / x) / x; }, 0.0, 1.0, 1e-14, 0.0, 10),
                  NumericError);
}
