#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "cpw/calculus.hpp"
#include "cpw/quadrature.hpp"
#include "cpw/rng.hpp"
#include "cpw/weights.hpp"

using namespace cpw;

TEST_CASE("integrate step functions over sets") {
  StepFunction1D one = StepFunction1D::indicator(0, 1);
  CHECK(integrate(one, Cube::interval(0, 2)).value == doctest::Approx(1.0));

  StepFunction1D f({0, 1, 2, 4}, {2, 0, 3});
  CHECK(integrate(f, Cube::interval(0, 3)).value == doctest::Approx(5.0));

  StepFunction1D tailed({0.0}, {}, 0.0, 1.0);
  CHECK_FALSE(tailed.integral().finite);

  // additivity over disjoint pieces
  OpenSet e = OpenSet::intervals({{0, 0.5}, {1.5, 2.5}});
  double direct = integrate(f, e).value;
  double parts = integrate(f, Cube::interval(0, 0.5)).value + integrate(f, Cube::interval(1.5, 2.5)).value;
  CHECK(direct == doctest::Approx(parts));
}

TEST_CASE("average power means") {
  StepFunction1D one = StepFunction1D::indicator(0, 1);
  CHECK(average(one, Cube::interval(0, 2), 1.0) == doctest::Approx(0.5));
  CHECK(average(one, Cube::interval(0, 2), 2.0) == doctest::Approx(std::sqrt(0.5)));
  StepFunction1D two = StepFunction1D::indicator(0, 1, 2.0);
  CHECK(average(two, Cube::interval(0, 1), 3.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(average(one, Cube::interval(0, 1), 0.5), std::invalid_argument);
}

TEST_CASE("average is monotone in the exponent") {
  Rng rng(101);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> breaks{-2.0, rng.uniform(-1, 0), rng.uniform(0, 1), 2.0};
    StepFunction1D f(breaks, {rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3)});
    Cube q = Cube::interval(-2, 2);
    double t1 = rng.uniform(1.0, 3.0);
    double t2 = t1 + rng.uniform(0.0, 3.0);
    CHECK(average(f, q, t1) <= average(f, q, t2) * (1 + 1e-12));
  }
}

TEST_CASE("lp_quasinorm exact cases") {
  Weight ind = Weight::step(StepFunction1D::indicator(0, 1));
  CHECK(lp_quasinorm(StepFunction1D::indicator(0, 1), 2.0, ind).value == doctest::Approx(1.0));

  // p < 1 quasi-norms on a constant: (int 2^{1/2})^2 = 2
  StepFunction1D f2 = StepFunction1D::indicator(0, 1, 2.0);
  CHECK(lp_quasinorm(f2, 0.5, ind).value == doctest::Approx(2.0));

  CHECK_THROWS_AS(lp_quasinorm(f2, 0.0, ind), std::invalid_argument);
}

TEST_CASE("lp_quasinorm against cellwise summation on a KM weight") {
  Weight km = km_weight_1d(KmRule::geometric_power(2.0));
  StepFunction1D f({-3, -1, 0.5, 4.25}, {1.5, 0.25, 2.0});
  auto got = lp_quasinorm(f, 2.0, km);

  // oracle: direct summation over the refinement cells
  StepFunction1D w = km.to_step(-4, 5);
  double acc = 0.0;
  std::vector<double> edges(f.breakpoints());
  for (double b : w.breakpoints()) edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double mid = 0.5 * (edges[i] + edges[i + 1]);
    acc += f(mid) * f(mid) * w(mid) * (edges[i + 1] - edges[i]);
  }
  CHECK(got.value == doctest::Approx(std::sqrt(acc)).epsilon(1e-12));
}

TEST_CASE("lp_quasinorm divergence flags") {
  StepFunction1D tailed({0.0}, {}, 0.0, 1.0);
  CHECK_FALSE(lp_quasinorm(tailed, 2.0, Weight::constant(1.0)).finite);

  // f with a tail against a compactly supported weight stays finite
  Weight ind = Weight::step(StepFunction1D::indicator(0, 1));
  auto v = lp_quasinorm(tailed, 2.0, ind);
  CHECK(v.finite);
  CHECK(v.value == doctest::Approx(1.0));
}

TEST_CASE("layer cake equals the p-th power of the quasinorm") {
  Weight ind = Weight::step(StepFunction1D::indicator(0, 1));
  auto lc = layer_cake_norm(StepFunction1D::indicator(0, 1), 2.0, ind);
  CHECK(lc.value == doctest::Approx(1.0));

  // two-step f, p = 3, step weight
  StepFunction1D f({-1, 0, 2}, {2.0, 0.5});
  Weight w = Weight::step(StepFunction1D({-2, 3}, {1.5}));
  auto cube = lp_quasinorm(f, 3.0, w);
  auto cake = layer_cake_norm(f, 3.0, w);
  CHECK(cake.value == doctest::Approx(std::pow(cube.value, 3.0)).epsilon(1e-12));

  CHECK(layer_cake_norm(StepFunction1D::zero(), 2.0, w).value == 0.0);
}

TEST_CASE("layer cake / quasinorm identity on random step pairs") {
  Rng rng(55);
  for (int i = 0; i < 60; ++i) {
    std::vector<double> fb{rng.uniform(-4, -2), rng.uniform(-2, 0), rng.uniform(0, 2)};
    std::sort(fb.begin(), fb.end());
    StepFunction1D f(fb, {rng.uniform(0, 4), rng.uniform(0, 4)});
    std::vector<double> wb{rng.uniform(-5, -3), rng.uniform(-1, 3)};
    std::sort(wb.begin(), wb.end());
    Weight w = Weight::step(StepFunction1D(wb, {rng.uniform(0.1, 2)}));
    double p = rng.uniform(0.5, 3.5);
    auto a = layer_cake_norm(f, p, w);
    auto b = lp_quasinorm(f, p, w);
    CHECK(a.value == doctest::Approx(std::pow(b.value, p)).epsilon(1e-11));
  }
}

TEST_CASE("grid functions integrate exactly") {
  GridFunctionND g(Cube({0.0, 0.0}, 2.0), 2, {1.0, 2.0, 3.0, 4.0}, 0.0);
  CHECK(g.integral().value == doctest::Approx(10.0));
  CHECK(g.integrate_box(Box({0.0, 0.0}, {1.0, 1.0})) == doctest::Approx(1.0));
  CHECK(g({0.5, 0.5}) == 1.0);
  CHECK(g({1.5, 1.5}) == 4.0);
  CHECK(g({5.0, 5.0}) == 0.0);

  GridFunctionND outside(Cube({0.0}, 1.0), 1, {2.0}, 1.0);
  CHECK_FALSE(outside.integral().finite);
  CHECK(outside.integrate_box(Box({-1.0}, {2.0})) == doctest::Approx(2.0 + 2.0));
}

TEST_CASE("step function invariants are enforced") {
  CHECK_THROWS_AS(StepFunction1D({1.0, 0.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction1D({0.0, 1.0}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction1D({0.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("adaptive quadrature sanity") {
  auto r = integrate_gk([](double x) { return std::exp(-x * x); }, -8, 8, {1e-13, 0.0, 2000});
  CHECK(r.value == doctest::Approx(std::sqrt(std::acos(-1.0))).epsilon(1e-12));
  CHECK(r.error < 1e-9);

  // integrable endpoint singularity: int_0^1 log(x)^2 = 2
  auto s = integrate_gk([](double x) { return std::log(x) * std::log(x); }, 0, 1, {1e-10, 0.0, 3000});
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-7));
}
