#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fraclab/error.hpp"
#include "fraclab/funcspace.hpp"

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

// Richardson-extrapolated composite trapezoid on [a, b].
double trapezoid_reference(auto&& f, double a, double b) {
  auto trap = [&](int n) {
    const double h = (b - a) / n;
    double s = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) s += f(a + i * h);
    return s * h;
  };
  const double t1 = trap(1 << 14), t2 = trap(1 << 15);
  return t2 + (t2 - t1) / 3.0;
}

}  // namespace

TEST_CASE("sample: catalog conventions") {
  auto c = sample(parse_entry("constant(5)"), Grid1D(-1, 1, 11));
  for (double v : c.values) CHECK(v == 5.0);
  auto g = make_function("gaussian(0,1)");
  CHECK((*g)(0.0) == 1.0);
  auto k = make_function("cosine(3)");
  CHECK((*k)(std::numbers::pi / 3) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(kind_of([] { make_function("nope"); }) == ErrorKind::UnknownFamily);
  CHECK(kind_of([] { make_function("gaussian(0,-1)"); }) == ErrorKind::ParameterOutOfRange);
  CHECK(kind_of([] { make_function("bump(0,x)"); }) == ErrorKind::ParameterOutOfRange);
}

TEST_CASE("closed forms: derivatives match centered differences") {
  for (const char* spec : {"gaussian(0.3,0.8)", "bump(0,1)", "exp_growth(1.5)", "cosine(2)", "heat_kernel(0.5)"}) {
    auto f = make_function(spec);
    for (double t : {-0.7, -0.2, 0.1, 0.45}) {
      const double e = 1e-5;
      CHECK(f->d1(t) == doctest::Approx(((*f)(t + e) - (*f)(t - e)) / (2 * e)).epsilon(1e-6));
      CHECK(f->d2(t) == doctest::Approx((f->d1(t + e) - f->d1(t - e)) / (2 * e)).epsilon(1e-5));
    }
  }
  // 2D Hessians are symmetric and match differences of the gradient
  for (const char* spec : {"gaussian(0.1,0.9)", "bump(0,1.2)", "cosine(1,2)", "heat_kernel(0.4)"}) {
    auto f = make_function(spec, 2);
    std::vector<double> x{0.3, -0.25}, h(4), gp(2), gm(2);
    f->hessian(x, h);
    CHECK(h[1] == doctest::Approx(h[2]));
    for (int j = 0; j < 2; ++j) {
      auto xp = x, xm = x;
      xp[j] += 1e-5;
      xm[j] -= 1e-5;
      f->gradient(xp, gp);
      f->gradient(xm, gm);
      for (int i = 0; i < 2; ++i) CHECK(h[i * 2 + j] == doctest::Approx((gp[i] - gm[i]) / 2e-5).epsilon(1e-5));
    }
  }
}

TEST_CASE("bump has exact compact support") {
  auto b = make_function("bump(0,1)");
  CHECK((*b)(1.0) == 0.0);
  CHECK((*b)(-1.0001) == 0.0);
  CHECK((*b)(0.999) > 0.0);
}

TEST_CASE("interpolant reproduces cubics and samples") {
  Grid1D g(-1, 1, 41);
  std::vector<double> v;
  for (double t : g.points()) v.push_back(t * t * t - 2 * t + 1);
  auto f = make_interpolant(g, v, DecayClass::bounded);
  for (double t : {-0.93, -0.11, 0.5, 0.77}) {
    CHECK((*f)(t) == doctest::Approx(t * t * t - 2 * t + 1).epsilon(1e-12));
    CHECK(f->d1(t) == doctest::Approx(3 * t * t - 2).epsilon(1e-12));
  }
  CHECK((*f)(g[7]) == v[7]);
  // fourth order: error drops ~16x per halving for a smooth function
  auto err = [](std::size_t n) {
    Grid1D gg(-2, 2, n);
    std::vector<double> vv;
    for (double t : gg.points()) vv.push_back(std::sin(3 * t));
    auto ff = make_interpolant(gg, vv, DecayClass::bounded);
    double e = 0;
    for (double t = -1.5; t < 1.5; t += 0.0173) e = std::max(e, std::abs((*ff)(t) - std::sin(3 * t)));
    return e;
  };
  CHECK(err(81) / err(161) > 12.0);
}

TEST_CASE("weighted_lp_norm examples") {
  Grid1D g(0, 1, 1001);
  auto one = from_samples(g, std::vector<double>(g.size(), 1.0), DecayClass::bounded);
  CHECK(weighted_lp_norm(one, sample_weight(make_weight("constant"), g), 2, {0, 1}) == doctest::Approx(1.0));
  CHECK(weighted_lp_norm(one, sample_weight(make_weight("exp_decay(1)"), g), 1, {0, 1}) ==
        doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-7));
  auto lin = from_samples(g, g.points(), DecayClass::bounded);
  CHECK(weighted_lp_norm(lin, sample_weight(make_weight("constant"), g), 2, {0, 1}) ==
        doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-6));
}

TEST_CASE("weighted_lp_norm errors") {
  Grid1D g(0, 1, 11), h(0, 2, 11);
  auto f = from_samples(g, std::vector<double>(11, 1.0), DecayClass::bounded);
  CHECK(kind_of([&] { weighted_lp_norm(f, sample_weight(make_weight("constant"), h), 2, {0, 1}); }) ==
        ErrorKind::GridMismatch);
  SampledWeight neg{GridND({g}), std::vector<double>(11, 1.0)};
  neg.values[4] = -1.0;
  CHECK(kind_of([&] { weighted_lp_norm(f, neg, 2, {0, 1}); }) == ErrorKind::NonPositiveWeight);
  CHECK(kind_of([&] { weighted_lp_norm(f, sample_weight(make_weight("constant"), g), 0.5, {0, 1}); }) ==
        ErrorKind::ParameterOutOfRange);
}

TEST_CASE("weighted_lp_norm: homogeneity and monotonicity") {
  Grid1D g(-3, 3, 301);
  auto w = sample_weight(make_weight("exp_decay(0.5)"), g);
  auto f = sample(make_function("gaussian(0,1)"), g);
  auto b = sample(make_function("bump(0,1)"), g);
  for (double c : {-3.0, 0.0, 0.25, 7.0}) {
    auto cf = f;
    for (double& v : cf.values) v *= c;
    for (double p : {1.0, 2.0, 3.5})
      CHECK(weighted_lp_norm(cf, w, p, {-2, 2}) ==
            doctest::Approx(std::abs(c) * weighted_lp_norm(f, w, p, {-2, 2})).epsilon(1e-13));
  }
  // bump <= gaussian pointwise (both peak at 1, bump decays faster)
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(std::abs(b.values[i]) <= std::abs(f.values[i]) + 1e-15);
  CHECK(weighted_lp_norm(b, w, 2, {-3, 3}) <= weighted_lp_norm(f, w, 2, {-3, 3}));
}

TEST_CASE("tail_norm_A") {
  Grid1D g(-10, 10, 201);
  auto zero = sample(make_function("constant(0)"), g);
  CHECK(tail_norm_A(zero, FracOrder::alpha(0.3), 2.0).value == 0.0);

  auto one = sample(make_function("constant(1)"), g);
  const auto t = tail_norm_A(one, FracOrder::alpha(0.5), 0.0);
  // integral_0^inf dx / (1 + x^1.5) = (2 pi / 3) / sin(2 pi / 3)
  const double exact = (2 * std::numbers::pi / 3) / std::sin(2 * std::numbers::pi / 3);
  CHECK(t.value == doctest::Approx(exact).epsilon(1e-10));
  CHECK(t.truncation_bound < 1e-8);

  auto gs = sample(make_function("gaussian(0,1)"), g);
  // x = +-u^4 turns |x|^{1.25} into u^5, smooth for the trapezoid oracle
  auto h = [](double x) { return std::exp(-x * x / 2) / (1 + std::pow(std::abs(x), 1.25)); };
  const double ref = trapezoid_reference([&](double u) { return h(-std::pow(u, 4)) * 4 * u * u * u; }, 0.0,
                                         std::pow(12.0, 0.25)) +
                     trapezoid_reference([&](double u) { return h(std::pow(u, 4)) * 4 * u * u * u; }, 0.0, 1.0);
  CHECK(std::abs(tail_norm_A(gs, FracOrder::alpha(0.25), 1.0).value - ref) < 1e-8);

  // monotone in A
  double prev = -1;
  for (double A : {-3.0, -1.0, 0.0, 0.5, 2.0, 6.0}) {
    const double v = tail_norm_A(gs, FracOrder::alpha(0.4), A).value;
    CHECK(v >= prev);
    prev = v;
  }
  // e^{-t} grows toward -infinity
  auto grow_left = sample(reflect(make_function("exp_growth(1)")), g);
  CHECK(kind_of([&] { tail_norm_A(grow_left, FracOrder::alpha(0.5), 0.0); }) == ErrorKind::DivergentTail);
  // cosine: bounded, periodic tail
  auto cs = sample(make_function("cosine(1)"), g);
  const auto tc = tail_norm_A(cs, FracOrder::alpha(0.5), 0.0);
  CHECK(std::isfinite(tc.value));
  CHECK(tc.truncation_bound < 1e-6);
}

TEST_CASE("ls_tail_norm") {
  Grid1D g(-4, 4, 17);
  auto one = sample(make_function("constant(1)", 1), GridND({g}));
  CHECK(ls_tail_norm(one, FracOrder::s(0.5)).value == doctest::Approx(std::numbers::pi).epsilon(1e-10));
  auto zero = sample(make_function("constant(0)", 2), GridND(g, 2));
  CHECK(ls_tail_norm(zero, FracOrder::s(0.3)).value == 0.0);
  auto g2 = sample(make_function("gaussian(0,1)", 2), GridND(g, 2));
  QuadratureSpec q;
  const double a = ls_tail_norm(g2, FracOrder::s(0.3), q).value;
  q.angular_nodes = 128;
  q.n_tail = 32;
  const double b = ls_tail_norm(g2, FracOrder::s(0.3), q).value;
  CHECK(std::abs(a - b) <= 1e-6 * b);
}

TEST_CASE("mollify_one_sided") {
  Grid1D g(-3, 3, 121);
  auto c = sample(make_function("constant(2.5)"), g);
  for (double eps : {0.05, 0.5, 2.0})
    for (double v : mollify_one_sided(c, eps).values) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));

  auto gs = sample(make_function("gaussian(0,1)"), g);
  auto dist = [&](double eps) {
    auto m = mollify_one_sided(gs, eps);
    double d = 0;
    for (std::size_t i = 0; i < g.size(); ++i) d = std::max(d, std::abs(m.values[i] - gs.values[i]));
    return d;
  };
  CHECK(dist(0.01 * 6) < dist(0.1));

  auto ind = sample(make_function("indicator(0,1)"), Grid1D(-1, 2, 301));
  auto mi = mollify_one_sided(ind, 0.1);
  CHECK((*mi.closed_form)(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  // only the past is used: just right of the jump at 0 the average is partial
  CHECK((*mi.closed_form)(0.05) < 1.0);
  CHECK((*mi.closed_form)(1.05) > 0.0);

  CHECK(kind_of([&] { mollify_one_sided(gs, 0.01); }) == ErrorKind::EpsilonTooSmall);
}

TEST_CASE("mollification commutes with differentiation") {
  Grid1D g(-3, 3, 121);
  auto f = make_function("gaussian(0.2,0.7)");
  auto m = mollify_one_sided(sample(f, g), 0.3).closed_form;
  auto md = mollify_one_sided(sample(derivative(f), g), 0.3).closed_form;
  for (double t : {-1.0, -0.2, 0.4, 1.3}) {
    const double e = 1e-5;
    CHECK(((*m)(t + e) - (*m)(t - e)) / (2 * e) == doctest::Approx((*md)(t)).epsilon(1e-7));
  }
}

TEST_CASE("csv layout") {
  auto f = sample(make_function("constant(1)"), Grid1D(0, 1, 3));
  CHECK(to_csv(f) == "t,value\n0,1\n0.5,1\n1,1\n");
  auto f2 = sample(make_function("constant(2)", 2), GridND(Grid1D(0, 1, 2), 2));
  CHECK(to_csv(f2).rfind("t,x2,value\n0,0,2\n", 0) == 0);
}

TEST_CASE("combinators") {
  auto g = make_function("gaussian(0,1)");
  auto r = reflect(make_function("exp_growth(1)"));
  CHECK((*r)(-1.0) == doctest::Approx(std::exp(1.0)));
  CHECK(r->d1(0.0) == doctest::Approx(-1.0));
  auto t = translate(g, 1.5);
  CHECK((*t)(1.5) == 1.0);
  CHECK(t->traits().support_lo[0] == doctest::Approx(g->traits().support_lo[0] + 1.5));
  auto d = dilate(g, 2.0);
  CHECK((*d)(0.5) == doctest::Approx((*g)(1.0)));
  CHECK(d->d1(0.5) == doctest::Approx(2.0 * g->d1(1.0)));
  auto lc = linear_combination(2.0, g, -1.0, make_function("bump(0,1)"));
  CHECK((*lc)(0.0) == doctest::Approx(1.0));
  auto dg = derivative(g);
  CHECK((*dg)(1.0) == doctest::Approx(g->d1(1.0)));
}
