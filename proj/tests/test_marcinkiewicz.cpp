#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "cpw/marcinkiewicz.hpp"
#include "cpw/maximal.hpp"
#include "cpw/sparse.hpp"

using namespace cpw;

TEST_CASE("level decomposition of the unit indicator") {
  StepFunction1D f = StepFunction1D::indicator(0, 1);
  auto dec = level_decompose(f, -3, 0, 1.0);

  // Omega_{-1} = (-1, 2), Omega_0 empty (Mf <= 1), Omega_{-2} = (-3, 4)
  CHECK(dec.omega_at(-1).measure() == doctest::Approx(3.0));
  CHECK(dec.omega_at(0).is_empty());
  CHECK(dec.omega_at(-2).measure() == doctest::Approx(7.0));

  // nesting and Whitney validation per level
  for (int k = -3; k < 0; ++k) {
    CHECK(dec.omega_at(k + 1).subset_of_ae(dec.omega_at(k), 1e-12));
    auto rep = whitney_validate(dec.omega_at(k), dec.family_at(k), 1.0);
    CHECK(rep.pass());
  }
}

TEST_CASE("mkpq closed-form anchor") {
  StepFunction1D f = StepFunction1D::indicator(0, 1);
  auto dec = level_decompose(f, -1, 0, 1.0);
  Weight one = Weight::constant(1.0);

  // 2^{-1} sum_Q 3|Q| = (3/2) |Omega_{-1}| = 9/2
  auto v = mkpq_integral(dec, -1, 1.0, 2.0, one);
  CHECK(v.value == doctest::Approx(4.5).epsilon(1e-9));

  // empty level contributes zero
  CHECK(mkpq_integral(dec, 0, 1.0, 2.0, one).value == 0.0);

  CHECK_THROWS_AS(mkpq_integral(dec, -1, 1.0, 1.0, one), std::invalid_argument);
}

TEST_CASE("mkpq additivity over the Whitney family") {
  StepFunction1D f({-1, 0, 2}, {2.0, 0.5});
  auto dec = level_decompose(f, -2, 2, 1.0);
  Weight one = Weight::constant(1.0);
  auto total = mkpq_integral(dec, -1, 1.5, 2.0, one);
  double by_cubes = 0.0;
  for (const auto& q : dec.family_at(-1))
    by_cubes += tail_functional(q, one, PsiFunction::power(2)).value;
  by_cubes *= std::pow(0.5, 1.5);
  CHECK(total.value == doctest::Approx(by_cubes).epsilon(1e-10));
}

TEST_CASE("mkpq against cube-by-cube summation on a KM weight") {
  StepFunction1D f = StepFunction1D::indicator(0, 1);
  auto dec = level_decompose(f, -2, 0, 1.0);
  Weight km = km_weight_1d(KmRule::geometric_power(2.0));
  auto v = mkpq_integral(dec, -2, 1.0, 2.0, km);
  CHECK(v.finite);
  double acc = 0.0;
  for (const auto& q : dec.family_at(-2))
    acc += tail_functional(q, km, PsiFunction::power(2)).value;
  CHECK(v.value == doctest::Approx(0.25 * acc).epsilon(1e-10));
}

TEST_CASE("mpq sums the k-range with a certificate") {
  StepFunction1D f = StepFunction1D::indicator(0, 1);
  Weight one = Weight::constant(1.0);

  // p = 2 > 1: terms decay like 2^{k(p-1)} and the remainder certifies
  auto dec = level_decompose(f, -14, 0, 1.0);
  auto v = mpq_integral(dec, 2.0, 2.0, one);
  CHECK(v.finite);
  CHECK(v.note.empty());
  // closed form: sum_k 4^k * 3 |Omega_k|, |Omega_k| = 2^{1-k} - 1
  double expect = 0.0;
  for (int k = -60; k <= -1; ++k)
    expect += std::pow(4.0, k) * 3.0 * (std::ldexp(2.0, -k) - 1.0);
  CHECK(v.value == doctest::Approx(expect).epsilon(1e-4));

  // p = 1 with w = 1: no geometric decay, truncation reported in the note
  auto v1 = mpq_integral(dec, 1.0, 2.0, one);
  CHECK(!v1.note.empty());

  auto z = level_decompose(StepFunction1D::zero(), -3, 0, 1.0);
  CHECK(mpq_integral(z, 1.0, 2.0, one).value == 0.0);
}

TEST_CASE("mpq stability under the Whitney parameter") {
  StepFunction1D f({-1, 0, 2}, {2.0, 0.5});
  Weight one = Weight::constant(1.0);
  auto d1 = level_decompose(f, -6, 2, 1.0);
  auto d2 = level_decompose(f, -6, 2, 2.0);
  double a = mpq_integral(d1, 2.0, 2.0, one).value;
  double b = mpq_integral(d2, 2.0, 2.0, one).value;
  CHECK(a / b < 4.0);
  CHECK(b / a < 4.0);
}

TEST_CASE("lemma ratio behaves across the KM family") {
  Weight one = Weight::constant(1.0);
  StepFunction1D f = StepFunction1D::indicator(0, 1);
  double base = lemma_ratio(f, one, 1.0, 2.0, -7, 2);
  CHECK(std::isfinite(base));
  CHECK(base > 0.0);

  CHECK_THROWS_AS(lemma_ratio(f, one, 2.0, 2.0, -6, 2), std::invalid_argument);

  Weight km = km_weight_1d(KmRule::geometric_power(2.0));
  double prev = 0.0;
  for (double span : {1.0, 2.0}) {
    StepFunction1D g = StepFunction1D::indicator(0, span);
    double r = lemma_ratio(g, km, 1.5, 2.0, -7, 3);
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
    if (prev > 0) {
      CHECK(r / prev < 10.0);
      CHECK(prev / r < 10.0);
    }
    prev = r;
  }
}

TEST_CASE("layer cake sums against the maximal norm") {
  StepFunction1D f({-1, 0, 2}, {2.0, 0.5});
  Weight w = Weight::step(StepFunction1D::indicator(-2, 3));
  double p = 2.0;
  auto dec = level_decompose(f, -8, 2, 1.0);
  double t = layer_cake_sum(dec, p, w);
  auto n = maximal_lp_mass(f, p, w);
  CHECK(t <= n.value * (1 + 1e-9));
  CHECK(n.value <= std::pow(2.0, p) * t * (1 + 1e-9));

  // the undifferenced variant is reported alongside; p S >= (1 - 2^-p) p T'
  double ps = layer_cake_sum_undifferenced(dec, p, w);
  CHECK(ps > 0.0);
  CHECK(ps >= t);
}
