#include <doctest.h>

#include <cmath>

#include "casimir/error.hpp"
#include "casimir/pfa.hpp"

using namespace casimir;
using pfa::Convention;

namespace {
// mpmath, 30 digits, a = 2, h = 0.5, b = 1.
constexpr double kRect = 0.010923390287664003680;
constexpr double kChamfer[] = {0.010811852938692693669, 0.010528841715500231768, 0.010131557422736411706,
                               0.0099027992333993107253};
constexpr double kFillet[] = {0.010873380698687717559, 0.010739349897549267105, 0.010540328935351167785,
                              0.010421036658523954036};
constexpr double kSizes[] = {0.04, 0.08, 0.12, 0.14};

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }
}  // namespace

TEST_CASE("printed formulas against the high-precision oracle") {
  CHECK(close(pfa::pfa_rect(2, 0.5, 1).f_pfa, kRect, 1e-13));
  for (int i = 0; i < 4; ++i) {
    CAPTURE(kSizes[i]);
    CHECK(close(pfa::pfa_chamfer(2, 0.5, 1, kSizes[i]).f_pfa, kChamfer[i], 1e-12));
    CHECK(close(pfa::pfa_fillet(2, 0.5, 1, kSizes[i]).f_pfa, kFillet[i], 1e-10));
  }
}

TEST_CASE("duty-cycle convention is the printed one times a") {
  CHECK(close(pfa::pfa_rect(2, 0.5, 1, Convention::DutyCycle).f_pfa, 2 * kRect, 1e-13));
  CHECK(close(pfa::pfa_chamfer(2, 0.5, 1, 0.08, Convention::DutyCycle).f_pfa, 2 * kChamfer[1], 1e-12));
  // Flat limit: pi^2/240 at any a only in the duty-cycle convention.
  CHECK(close(pfa::pfa_rect(3, 0, 1, Convention::DutyCycle).f_pfa, 0.0411233516712056609, 1e-14));
  CHECK(close(pfa::pfa_rect(1, 0, 1).f_pfa, 0.0411233516712056609, 1e-14));
}

TEST_CASE("edge formulas reduce to the rectangular one") {
  const double rect = pfa::pfa_rect(2, 0.5, 1).f_pfa;
  CHECK(close(pfa::pfa_chamfer(2, 0.5, 1, 1e-6).f_pfa, rect, 1e-6));
  CHECK(close(pfa::pfa_fillet(2, 0.5, 1, 1e-6).f_pfa, rect, 1e-6));
  CHECK(close(pfa::pfa_chamfer(2, 0.5, 1, 1e-10).f_pfa, rect, 1e-8));
  CHECK(close(pfa::pfa_fillet(2, 0.5, 1, 1e-10).f_pfa, rect, 1e-8));
}

TEST_CASE("fillet removes less than chamfer") {
  for (auto c : {Convention::Printed, Convention::DutyCycle}) {
    for (double s : kSizes) CHECK(pfa::pfa_fillet(2, 0.5, 1, s, c).f_pfa >= pfa::pfa_chamfer(2, 0.5, 1, s, c).f_pfa);
  }
}

TEST_CASE("normalization") {
  CHECK(pfa::normalize(0.0124, kRect, kRect) == doctest::Approx(0.0124).epsilon(1e-15));
  CHECK(pfa::normalize(0.0124, 3.0, 3.0 * 0.97) == doctest::Approx(0.0124 * 0.97).epsilon(1e-15));
  const double a = pfa::normalize(0.0124, kRect, kChamfer[1]);
  CHECK(a == doctest::Approx(0.011952116864270990).epsilon(1e-13));
  const double b = pfa::normalize(0.0124, kRect, kFillet[1]);
  CHECK(b == doctest::Approx(0.012191081268971964).epsilon(1e-10));
  // Convention independence.
  const double printed = pfa::normalize(0.02, pfa::pfa_rect(2, 0.5, 1).f_pfa, pfa::pfa_chamfer(2, 0.5, 1, 0.08).f_pfa);
  const double duty = pfa::normalize(0.02, pfa::pfa_rect(2, 0.5, 1, Convention::DutyCycle).f_pfa,
                                     pfa::pfa_chamfer(2, 0.5, 1, 0.08, Convention::DutyCycle).f_pfa);
  CHECK(printed == doctest::Approx(duty).epsilon(1e-15));
  CHECK_THROWS_AS(pfa::normalize(0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(pfa::normalize(1.0, -1.0, 1.0), DomainError);
}

TEST_CASE("dispatch on the configured edge") {
  GearConfig g;
  g.edge = EdgeSpec::fillet(0.08);
  CHECK(pfa::pfa_for(g).f_pfa == pfa::pfa_fillet(2, 0.5, 1, 0.08).f_pfa);
  CHECK(pfa::pfa_for(g).variant == EdgeVariant::Fillet);
  g.edge = {};
  CHECK(pfa::pfa_for(g).f_pfa == pfa::pfa_rect(2, 0.5, 1).f_pfa);
}

TEST_CASE("PFA rejects out-of-range sizes") {
  CHECK_THROWS_AS(pfa::pfa_chamfer(2, 0.5, 1, 0.3), ConfigError);
  CHECK_THROWS_AS(pfa::pfa_fillet(2, 0.5, 1, 0.0), ConfigError);
  CHECK_THROWS_AS(pfa::pfa_rect(0, 0.5, 1), ConfigError);
  CHECK_THROWS_AS(pfa::pfa_fillet(2, 0.5, 1, 0.08, Convention::Printed, 0.0), DomainError);
}
