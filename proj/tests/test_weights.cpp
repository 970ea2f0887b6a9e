#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fraclab/error.hpp"
#include "fraclab/weights.hpp"

using namespace fraclab;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::IoError;
}

LatticeSpec small_lattice() { return LatticeSpec::on_grid(Grid1D(-2, 2, 9), -6, 4); }

}  // namespace

TEST_CASE("weight integrals") {
  const Weight e = make_weight("exp_decay(1)");
  CHECK(weight_integral(e, 1.0, 0.0, 3.0) == doctest::Approx(1.0 - std::exp(-3.0)).epsilon(1e-13));
  CHECK(weight_integral(e, -1.0, -2.0, 0.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-13));
  const Weight pw = make_weight("power(0.5)");
  // int_{-1}^{2} |x|^{-1} ... and |x|^{1/2}
  CHECK(weight_integral(pw, 1.0, -1.0, 2.0) == doctest::Approx(2.0 / 3.0 * (1.0 + std::pow(2.0, 1.5))).epsilon(1e-10));
  CHECK(weight_integral(pw, -1.0, 0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::isinf(weight_integral(make_weight("power(-2)"), 1.0, -1.0, 1.0)));
  CHECK(std::isinf(weight_integral(pw, -2.0, 0.0, 1.0)));
  const Weight pc = make_weight("piecewise(1,3)");
  CHECK(weight_integral(pc, 1.0, -0.5, 0.25) == doctest::Approx(0.5 + 0.75).epsilon(1e-14));
}

TEST_CASE("weight constants: constant weight gives exactly one") {
  const Weight one = make_weight("constant");
  const auto lat = small_lattice();
  for (double p : {1.5, 2.0, 4.0}) {
    CHECK(sawyer_minus_constant(one, p, lat).value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sawyer_plus_constant(one, p, lat).value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(muckenhoupt_constant(one, p, lat).value == doctest::Approx(1.0).epsilon(1e-15));
  }
  const auto balls = LatticeSpec::on_grid(GridND(Grid1D(-1, 1, 3), 2), -3, 2);
  CHECK(muckenhoupt_constant(make_weight("constant", 2), 2.0, balls).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weight constants: e^{-t} is one-sided but not two-sided") {
  const Weight e = make_weight("exp_decay(1)");
  const auto lat = LatticeSpec::on_grid(Grid1D(-2, 2, 5), -10, 10);
  const auto scan = weight_scan(e, 2.0, WeightSide::minus, lat);
  for (const auto& row : scan.rows)
    CHECK(row.product == doctest::Approx((1.0 - std::exp(-row.h)) / row.h).epsilon(1e-10));
  const auto c = sawyer_minus_constant(e, 2.0, lat);
  CHECK(c.value <= 1.0 + 1e-9);
  CHECK(c.argmax_h == std::ldexp(1.0, -10));
  const auto two = weight_scan(e, 2.0, WeightSide::two_sided, lat);
  bool above = false;
  for (const auto& row : two.rows) {
    const double H = 2.0 * row.h;  // interval [a - h, a + h]
    const double want = std::sqrt((1.0 - std::exp(-H)) * (std::exp(H) - 1.0)) / H;
    if (std::isfinite(want)) CHECK(row.product == doctest::Approx(want).epsilon(1e-9));
    above = above || row.product > 1e3;
  }
  CHECK(above);
  CHECK(kind_of([&] { muckenhoupt_constant(e, 2.0, lat, {}, 1e3); }) == ErrorKind::IntegralOverflow);
  // mirror image
  const Weight g = make_weight("exp_growth(1)");
  const auto plus = weight_scan(g, 2.0, WeightSide::plus, lat);
  for (std::size_t i = 0; i < plus.rows.size(); ++i)
    CHECK(plus.rows[i].product == doctest::Approx(scan.rows[i].product).epsilon(1e-10));
}

TEST_CASE("weight constants: duality, scale invariance, lattice monotonicity") {
  const auto lat = small_lattice();
  for (const char* spec : {"exp_decay(1)", "power(0.5)", "piecewise(1,3)", "exp_growth(0.5)"}) {
    const Weight w = make_weight(spec);
    const double p = 3.0, pp = 1.5;
    const auto a = weight_scan(w, p, WeightSide::minus, lat);
    const auto b = weight_scan(w.power(1.0 - pp), pp, WeightSide::plus, lat);
    for (std::size_t i = 0; i < a.rows.size(); ++i)
      CHECK(a.rows[i].product == doctest::Approx(b.rows[i].product).epsilon(1e-10));
    const auto s = weight_scan(w.scaled(7.5), p, WeightSide::minus, lat);
    for (std::size_t i = 0; i < a.rows.size(); ++i)
      CHECK(s.rows[i].product == doctest::Approx(a.rows[i].product).epsilon(1e-12));
    auto bigger = lat;
    bigger.scales.push_back(32.0);
    CHECK(sawyer_minus_constant(w, p, bigger).value >= sawyer_minus_constant(w, p, lat).value);
  }
}

TEST_CASE("Muckenhoupt: power weights") {
  const Weight half = make_weight("power(0.5)");
  const double c1 = muckenhoupt_constant(half, 2.0, LatticeSpec::on_grid(Grid1D(-1, 1, 5), -6, 3)).value;
  const double c2 = muckenhoupt_constant(half, 2.0, LatticeSpec::on_grid(Grid1D(-1, 1, 9), -10, 6)).value;
  CHECK(c1 > 1.0);
  CHECK(c2 >= c1);
  CHECK(c2 < 1.2 * c1);
  // centered at 0: avg w = (2/3) r^{1/2}, avg w^{-1} = 2 r^{-1/2}
  LatticeSpec at0{1, {0.0}, {0.5, 1.0}};
  CHECK(muckenhoupt_constant(half, 2.0, at0).value == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-8));
  CHECK(kind_of([] {
          muckenhoupt_constant(make_weight("power(-2)"), 2.0, LatticeSpec::on_grid(Grid1D(-1, 1, 5), -6, 0));
        }) == ErrorKind::IntegralOverflow);
  // 2D: |x|^{1/2} on balls centered at 0 gives the radial closed form
  // avg w = 2/(r^2) int_0^r rho^{3/2} = (4/5) r^{1/2}, avg w^{-1} = (4/3) r^{-1/2}
  LatticeSpec b0{2, {0.0, 0.0}, {1.0}};
  const Weight h2 = make_weight("power(0.5)", 2);
  CHECK(muckenhoupt_constant(h2, 2.0, b0).value == doctest::Approx(std::sqrt(16.0 / 15.0)).epsilon(1e-8));
  LatticeSpec off{2, {0.3, 0.4}, {0.25, 1.0, 4.0}};
  const auto r = muckenhoupt_constant(h2, 2.0, off);
  CHECK(r.value > 1.0);
  CHECK(r.value < 2.0);
  CHECK(kind_of([] { muckenhoupt_constant(make_weight("exp_decay", 2), 2.0, LatticeSpec{2, {0, 0}, {1}}); }) ==
        ErrorKind::ParameterOutOfRange);
}

TEST_CASE("A1 ratio") {
  const Grid1D grid(-1, 1, 9);
  CHECK(a1_minus_ratio(make_weight("constant"), grid).ratio == doctest::Approx(1.0).epsilon(1e-14));
  const auto e = a1_minus_ratio(make_weight("exp_decay(1)"), grid);
  CHECK(e.ratio == doctest::Approx(1.0 - std::ldexp(1.0, -11)).epsilon(1e-6));
  CHECK(e.ratio <= 1.0);
  CHECK_FALSE(e.cap_exceeded);
  const auto g = a1_minus_ratio(make_weight("exp_growth(1)"), grid);
  CHECK(g.cap_exceeded);
}
