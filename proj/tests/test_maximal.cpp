#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fraclab/error.hpp"
#include "fraclab/maximal.hpp"

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

}  // namespace

TEST_CASE("one-sided maximal functions: closed-form examples") {
  const auto lat = ScaleLattice::dyadic(-6, 4);
  auto c = make_function("constant(-2.5)");
  for (double t : {-1.0, 0.0, 3.0}) {
    CHECK(m_minus_at(*c, t, lat) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(m_plus_at(*c, t, lat) == doctest::Approx(2.5).epsilon(1e-14));
  }
  auto ind = make_function("indicator(0,1)");
  double at = 0;
  CHECK(m_minus_at(*ind, 2.0, lat, &at) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(at == 2.0);
  CHECK(m_minus_at(*ind, 0.5, lat) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m_plus_at(*ind, -1.0, lat) == doctest::Approx(0.5).epsilon(1e-12));
  // exact backward averages of e^{-t}: (e^{h} - 1)/h e^{-t}
  auto e = reflect(make_function("exp_growth(1)"));
  const auto small = ScaleLattice::dyadic(-2, 1);
  CHECK(m_minus_at(*e, 0.3, small) == doctest::Approx(std::exp(-0.3) * (std::exp(2.0) - 1.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("one-sided maximal functions: reflection, homogeneity, sublinearity") {
  const auto lat = ScaleLattice::dyadic(-5, 3);
  auto g = make_function("gaussian(0.3,0.7)");
  auto k = make_function("cosine(2)");
  auto rg = reflect(g);
  for (double t : {-1.0, 0.2, 1.4}) {
    CHECK(m_plus_at(*g, t, lat) == doctest::Approx(m_minus_at(*rg, -t, lat)).epsilon(1e-12));
    auto scaled = linear_combination(-3.0, g, 0.0, g);
    CHECK(m_minus_at(*scaled, t, lat) == doctest::Approx(3.0 * m_minus_at(*g, t, lat)).epsilon(1e-12));
    auto sum = linear_combination(1.0, g, 1.0, k);
    CHECK(m_minus_at(*sum, t, lat) <= m_minus_at(*g, t, lat) + m_minus_at(*k, t, lat) + 1e-12);
    CHECK(m_minus_at(*g, t, ScaleLattice::dyadic(-5, 0)) <= m_minus_at(*g, t, lat));
  }
}

TEST_CASE("one-sided maximal functions on grids") {
  auto s = sample(make_function("gaussian(0,1)"), Grid1D(-3, 3, 61));
  const auto lat = ScaleLattice::dyadic(-4, 1);
  const auto r = m_minus(s, lat, Window{-1, 1});
  REQUIRE(r.size() == 21);
  for (std::size_t i = 0; i < r.size(); ++i) {
    // smallest window of 1/16: the average is within sup|f'| h / 2 of f(t)
    CHECK(r.values[i] >= std::exp(-0.5 * r.points[i] * r.points[i]) - 0.61 / 32);
    CHECK(r.values[i] == doctest::Approx(m_minus_at(*s.closed_form, r.points[i], lat)).epsilon(1e-15));
  }
  CHECK(m_minus(s, lat, Window{-1, 1}, Exec::serial).values == r.values);
  // without a closed form the averaging windows must stay on the samples
  auto raw = from_samples(s.grid, s.values, DecayClass::gaussian);
  const auto rr = m_minus(raw, lat, std::nullopt);
  CHECK(rr.excluded == 20);  // hmax = 2 is 20 cells
  CHECK(rr.points.front() == doctest::Approx(-1.0));
  CHECK(kind_of([&] { m_minus(raw, ScaleLattice::dyadic(0, 4), std::nullopt); }) == ErrorKind::WindowTooNarrow);
  CHECK(kind_of([&] { m_minus(s, ScaleLattice{{}}, std::nullopt); }) == ErrorKind::ParameterOutOfRange);
}

TEST_CASE("centered maximal function") {
  auto ind = make_function("indicator(-1,1)");
  double x = 2.0, at = 0.0;
  ScaleLattice lat{{0.5, 1.0, 2.0, 3.0, 4.0}};
  CHECK(m_hl_at(*ind, std::span<const double>(&x, 1), lat, &at) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(at == 3.0);
  // ball averages of e^{-|x|^2/2} at the origin
  auto g2 = make_function("gaussian(0,1)", 2);
  std::vector<double> o2{0.0, 0.0};
  ScaleLattice one{{1.0}};
  CHECK(m_hl_at(*g2, o2, one) == doctest::Approx(2.0 * (1.0 - std::exp(-0.5))).epsilon(1e-9));
  auto g3 = make_function("gaussian(0,1)", 3);
  std::vector<double> o3{0.0, 0.0, 0.0};
  // 3 int_0^1 r^2 e^{-r^2/2} dr
  const double I = std::sqrt(std::numbers::pi / 2.0) * std::erf(1.0 / std::sqrt(2.0)) - std::exp(-0.5);
  CHECK(m_hl_at(*g3, o3, one) == doctest::Approx(3.0 * I).epsilon(1e-9));
  auto c2 = make_function("constant(4)", 2);
  CHECK(m_hl_at(*c2, o2, ScaleLattice::dyadic(-2, 2)) == doctest::Approx(4.0));
  // refinement never decreases
  auto b2 = make_function("bump(0.2,1)", 2);
  std::vector<double> p{0.9, -0.4};
  CHECK(m_hl_at(*b2, p, ScaleLattice::dyadic(-3, 2)) <= m_hl_at(*b2, p, dense_lattice(0.125, 4.0)) + 1e-14);
  auto s = sample(make_function("gaussian(0,1)", 2), GridND(Grid1D(-1, 1, 5), 2));
  const auto r = m_hl(s, ScaleLattice::dyadic(-2, 1), std::nullopt);
  CHECK(r.size() == 25);
  CHECK(r.dim == 2);
  for (double v : r.values) CHECK(v > 0.0);
}

TEST_CASE("Lorente domination") {
  auto g = sample(make_function("gaussian(0,1)"), Grid1D(-2, 2, 9));
  const auto lat = dense_lattice(1.0 / 64, 64.0);
  for (const auto& k : {box_kernel(), inverse_sqrt_kernel(), exp_kernel()}) {
    const auto r = lorente_domination_check(g, k, lat);
    CHECK(r.holds);
    CHECK(r.max_excess < 0.0);
  }
  auto one = sample(make_function("constant(1)"), Grid1D(-1, 1, 5));
  for (const auto& k : {box_kernel(), inverse_sqrt_kernel(), exp_kernel()}) {
    const auto r = lorente_domination_check(one, k, lat);
    CHECK(r.holds);
    CHECK(std::abs(r.max_excess) < 1e-9);
  }
  auto b = sample(make_function("bump(0,1)"), Grid1D(-1, 1, 9));
  CHECK(lorente_domination_check(b, inverse_sqrt_kernel(), lat).holds);
  Kernel bad{"ramp", [](double t) { return t; }, 1.0, false, 0.0, 0.5};
  CHECK(kind_of([&] { lorente_domination_check(b, bad, lat); }) == ErrorKind::KernelNotMonotone);
}

TEST_CASE("radial domination") {
  const auto lat = dense_lattice(1.0 / 32, 32.0);
  auto one = sample(make_function("constant(1)"), GridND(Grid1D(-1, 1, 3), 1));
  const auto r1 = radial_domination_check(one, heat_kernel_profile(1, 0.5), lat);
  CHECK(std::abs(r1.max_excess) < 1e-9);
  auto g = sample(make_function("gaussian(0,1)"), GridND(Grid1D(-2, 2, 9), 1));
  for (const auto& k : {heat_kernel_profile(1, 0.5), unit_ball_kernel(1), exp_radial_kernel(1)})
    CHECK(radial_domination_check(g, k, lat).holds);
  // the normalized ball kernel is one term of the sup
  const auto rb = radial_domination_check(g, unit_ball_kernel(1), ScaleLattice{{1.0}});
  CHECK(std::abs(rb.max_excess) < 1e-9);
  CHECK(exp_radial_kernel(2).mass == doctest::Approx(2 * std::numbers::pi));
  auto g2 = sample(make_function("gaussian(0,1)", 2), GridND(Grid1D(-1, 1, 3), 2));
  for (const auto& k : {heat_kernel_profile(2, 0.5), unit_ball_kernel(2), exp_radial_kernel(2)})
    CHECK(radial_domination_check(g2, k, dense_lattice(1.0 / 8, 8.0)).holds);
}

TEST_CASE("order supremum of fractional derivatives") {
  const std::vector<double> alphas{0.1, 0.3, 0.5, 0.7, 0.9};
  const auto lat = dense_lattice(1.0 / 32, 32.0);
  auto zero = sample(make_function("constant(0)"), Grid1D(-1, 1, 5));
  const auto z = order_sup_fracderiv(zero, alphas, lat);
  for (double v : z.values) CHECK(v == 0.0);
  auto e = sample(make_function("exp_growth(1)"), Grid1D(-1, 1, 9));
  const auto re = order_sup_fracderiv(e, alphas, lat, {}, Window{0, 0});
  REQUIRE(re.size() == 1);
  CHECK(re.values[0] == doctest::Approx(1.0).epsilon(1e-6));
  auto coarse = sample(make_function("gaussian(0,1)"), Grid1D(-6, 6, 25));
  auto fine = sample(make_function("gaussian(0,1)"), Grid1D(-6, 6, 49));
  const auto rc = order_sup_fracderiv(coarse, alphas, lat, {}, Window{-3, 3});
  const auto rf = order_sup_fracderiv(fine, alphas, lat, {}, Window{-3, 3});
  CHECK(rc.constant > 0.0);
  CHECK(std::abs(rf.constant / rc.constant - 1.0) < 0.1);
}
