#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fraclab/error.hpp"
#include "fraclab/special.hpp"

using namespace fraclab;

TEST_CASE("gamma at classical points") {
  CHECK(fraclab::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fraclab::gamma(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
  CHECK(fraclab::gamma(-0.5) == doctest::Approx(-2.0 * std::sqrt(std::numbers::pi)).epsilon(1e-13));
  CHECK(fraclab::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-13));
}

TEST_CASE("gamma agrees with the C library on (-1,0) and (0,30)") {
  for (double x = -0.995; x < 30.0; x += 0.0137) {
    if (std::abs(x) < 1e-9) continue;
    const double ref = std::tgamma(x);
    CHECK(std::abs(fraclab::gamma(x) - ref) <= 1e-10 * std::abs(ref));
  }
}

TEST_CASE("gamma recurrence residual") {
  double worst = 0.0;
  for (int i = 1; i < 20000; ++i) {
    const double x = -1.0 + 11.0 * i / 20000.0;
    if (std::abs(x) < 1e-6 || std::abs(x + 1.0) < 1e-6) continue;
    const double g1 = fraclab::gamma(x + 1.0);
    worst = std::max(worst, std::abs(g1 - x * fraclab::gamma(x)) / std::abs(g1));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("gamma poles and unsupported arguments") {
  for (double x : {0.0, -1.0, -1.5, -3.0}) {
    try {
      fraclab::gamma(x);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PoleOrUnsupported);
    }
  }
}

TEST_CASE("cns closed values") {
  CHECK(cns(1, 0.5) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
  CHECK(cns(2, 0.5) == doctest::Approx(0.5 / std::numbers::pi).epsilon(1e-12));
  CHECK_THROWS_AS(cns(1, 0.0), Error);
  CHECK_THROWS_AS(cns(1, 1.0), Error);
  CHECK_THROWS_AS(cns(0, 0.5), Error);
}

TEST_CASE("cns composition is internally consistent") {
  for (int n = 1; n <= 3; ++n)
    for (double s : {0.01, 0.3, 0.77, 0.99}) {
      const double lhs = cns(n, s) * std::abs(fraclab::gamma(-s));
      const double rhs = std::pow(4.0, s) * fraclab::gamma(n / 2.0 + s) / std::pow(std::numbers::pi, n / 2.0);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
    }
}

TEST_CASE("cns vanishes at both ends like s(1-s)") {
  for (int n = 1; n <= 2; ++n) {
    CHECK(cns(n, 1e-4) < 1e-3);
    CHECK(cns(n, 1.0 - 1e-4) < 1e-2);
    const double r = cns(n, 1e-4) / (1e-4 * (1 - 1e-4));
    CHECK(r > 0.1);
    CHECK(r < 10.0);
  }
}

TEST_CASE("FracOrder") {
  auto a = FracOrder::alpha(0.5);
  CHECK(a.gamma_neg() < 0.0);
  CHECK(a.inv_gamma_neg() == doctest::Approx(1.0 / a.gamma_neg()));
  CHECK_FALSE(a.cns().has_value());
  auto s = FracOrder::s(0.5, 1);
  REQUIRE(s.cns().has_value());
  CHECK(*s.cns() == doctest::Approx(1.0 / std::numbers::pi));
  CHECK_THROWS_AS(FracOrder::alpha(1.0), Error);
  CHECK_THROWS_AS(FracOrder::s(0.0), Error);
}

TEST_CASE("hurwitz zeta reduces to Riemann zeta at a = 1") {
  CHECK(hurwitz_zeta(2.0, 1.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-13));
  CHECK(hurwitz_zeta(4.0, 1.0) == doctest::Approx(std::pow(std::numbers::pi, 4) / 90.0).epsilon(1e-13));
  // zeta(b, a) = a^-b + zeta(b, a+1)
  for (double a : {0.1, 0.7, 3.3})
    CHECK(hurwitz_zeta(1.5, a) == doctest::Approx(std::pow(a, -1.5) + hurwitz_zeta(1.5, a + 1.0)).epsilon(1e-12));
}
