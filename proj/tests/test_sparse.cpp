#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "cpw/harness.hpp"
#include "cpw/maximal.hpp"
#include "cpw/quadrature.hpp"
#include "cpw/rng.hpp"
#include "cpw/sparse.hpp"

using namespace cpw;

TEST_CASE("cz_sparse on a constant is the root alone") {
  StepFunction1D f = StepFunction1D::indicator(0, 1);
  auto s = cz_sparse(f, {DyadicCube(0, {0})}, 2.0);
  REQUIRE(s.entries.size() == 1);
  CHECK(s.entries[0].removed.empty());
  auto chk = verify_sparse(s, 1.0);
  CHECK(chk.ok);
  CHECK(chk.worst_ratio == doctest::Approx(1.0));

  auto z = cz_sparse(StepFunction1D::zero(), {DyadicCube(0, {0})}, 2.0);
  CHECK(z.entries.size() == 1);
}

TEST_CASE("cz_sparse two-spike function produces nested stopping cubes") {
  StepFunction1D f({0.0, 0.0625, 0.125, 0.8125, 0.875, 1.0}, {8.0, 0.0, 0.0, 16.0, 0.1});
  auto s = cz_sparse(f, {DyadicCube(0, {0})}, 2.0);
  CHECK(s.entries.size() > 1);
  auto chk = verify_sparse(s, 0.5);
  CHECK(chk.ok);
  CHECK(chk.disjoint);
}

TEST_CASE("cz_sparse rejects bad input") {
  StepFunction1D tailed({0.0}, {}, 0.0, 1.0);
  CHECK_THROWS_AS(cz_sparse(tailed, {DyadicCube(0, {0})}, 2.0), std::invalid_argument);
  StepFunction1D f = StepFunction1D::indicator(0, 1);
  CHECK_THROWS_AS(cz_sparse(f, {DyadicCube(0, {0})}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cz_sparse(f, {DyadicCube(0, {0}), DyadicCube(1, {1})}, 2.0),
                  std::invalid_argument);
}

TEST_CASE("verify_sparse measures ratios exactly") {
  SparseCollection s;
  s.gamma = 0.5;
  SparseEntry root{DyadicCube(0, {0}), {DyadicCube(1, {0})}};  // E = [1/2, 1)
  s.entries.push_back(root);
  auto chk = verify_sparse(s, 0.5);
  CHECK(chk.ok);
  CHECK(chk.worst_ratio == doctest::Approx(0.5));
  CHECK_FALSE(verify_sparse(s, 0.6).ok);

  // two equal disjoint cubes with full exceptional sets
  SparseCollection two;
  two.entries.push_back({DyadicCube(0, {0}), {}});
  two.entries.push_back({DyadicCube(0, {1}), {}});
  auto chk2 = verify_sparse(two, 1.0);
  CHECK(chk2.ok);
  CHECK(chk2.worst_ratio == doctest::Approx(1.0));

  // overlapping exceptional sets are caught
  SparseCollection bad;
  bad.entries.push_back({DyadicCube(0, {0}), {}});
  bad.entries.push_back({DyadicCube(1, {0}), {}});  // child with full E inside parent's E
  CHECK_FALSE(verify_sparse(bad, 0.5).disjoint);
}

TEST_CASE("cz_sparse is (1-1/lambda)-sparse on random data") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    auto f = random_step_function(rng, static_cast<int>(rng.uniform_int(1, 8)), -8, 8, 0.0, 5.0);
    auto hull = f.support_hull();
    if (!hull) continue;
    double lambda = rng.uniform(1.5, 4.0);
    auto roots = dyadic_cover(Cube::interval(hull->first, hull->second));
    auto s = cz_sparse(f, roots, lambda);
    auto chk = verify_sparse(s, 1.0 - 1.0 / lambda);
    CHECK(chk.ok);
  }
}

TEST_CASE("sparse form closed cases") {
  SparseCollection s;
  s.entries.push_back({DyadicCube(0, {0}), {}});
  StepFunction1D one = StepFunction1D::indicator(0, 1);
  CHECK(sparse_form(s, one, one, 2.0, 1.0) == doctest::Approx(2.0));
  CHECK(sparse_form(s, one, one, 2.0, 0.5) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(sparse_form(s, one, one, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sparse_form(s, one, one, 2.0, 0.0), std::invalid_argument);

  // two-cube collection against a term-by-term oracle
  SparseCollection s2;
  s2.entries.push_back({DyadicCube(0, {0}), {}});
  s2.entries.push_back({DyadicCube(1, {2}), {}});
  StepFunction1D f({-0.5, 0.25, 1.5}, {2.0, 0.5});
  StepFunction1D g({0.0, 0.75, 2.0}, {1.0, 3.0});
  double t = 1.5;
  double expect = 0.0;
  for (const auto& e : s2.entries) {
    Cube q = e.cube.cube();
    expect += average(f, q, 1.0) * average(g, q, t) * q.volume();
  }
  expect *= std::pow(t / (t - 1.0), 1.0);
  CHECK(sparse_form(s2, f, g, t, 1.0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("sparse form is monotone under enlargement") {
  StepFunction1D f({-0.5, 0.25, 1.5}, {2.0, 0.5});
  StepFunction1D g({0.0, 0.75, 2.0}, {1.0, 3.0});
  SparseCollection small;
  small.entries.push_back({DyadicCube(0, {0}), {}});
  SparseCollection big = small;
  big.entries.push_back({DyadicCube(1, {2}), {}});
  CHECK(sparse_form(small, f, g, 2.0, 1.0) <= sparse_form(big, f, g, 2.0, 1.0));
  StepFunction1D f2 = f.scaled(2.0);
  CHECK(sparse_form(small, f, g, 2.0, 1.0) <= sparse_form(small, f2, g, 2.0, 1.0));
}

TEST_CASE("sparse mass ratio") {
  Weight one = Weight::constant(1.0);
  Cube q0 = Cube::interval(0, 1);

  SparseCollection self;
  self.entries.push_back({DyadicCube(0, {0}), {}});
  CHECK(sparse_mass_ratio(self, q0, one, 2.0) == doctest::Approx(1.0).epsilon(1e-9));

  // dyadic children: Phi_2 is linear in |Q|, so the ratio is again 1
  SparseCollection children;
  children.entries.push_back({DyadicCube(1, {0}), {}});
  children.entries.push_back({DyadicCube(1, {1}), {}});
  CHECK(sparse_mass_ratio(children, q0, one, 2.0) == doctest::Approx(1.0).epsilon(1e-9));

  // a deep tower against a KM weight stays finite
  Weight km = km_weight_1d(KmRule::geometric_power(2.0));
  SparseCollection tower;
  for (int g = 0; g <= 4; ++g) tower.entries.push_back({DyadicCube(g, {0}), {}});
  double r = sparse_mass_ratio(tower, q0, km, 2.0);
  CHECK(std::isfinite(r));
  CHECK(r > 1.0);

  SparseCollection outside;
  outside.entries.push_back({DyadicCube(0, {3}), {}});
  CHECK_THROWS_AS(sparse_mass_ratio(outside, q0, one, 2.0), std::invalid_argument);
}

TEST_CASE("corollary norm ratio") {
  Weight one = Weight::constant(1.0);
  SparseCollection s;
  s.entries.push_back({DyadicCube(0, {0}), {}});
  StepFunction1D f = StepFunction1D::indicator(0, 1);

  // Phi_2([0,1]) = 3 and ||Mf||_{3/2}^{3/2} = 5 give ratio 3/5
  double r = corollary_norm_ratio(s, f, one, 1.5, 2.0);
  CHECK(r == doctest::Approx(0.6).epsilon(1e-6));

  CHECK_THROWS_AS(corollary_norm_ratio(s, f, one, 2.0, 2.0), std::invalid_argument);
  CHECK(std::isinf(corollary_norm_ratio(s, StepFunction1D::zero(), one, 1.5, 2.0)));

  // translation by the KM period with a constant-table rule is exact
  std::map<long long, double> ell, h;
  for (long long k = -30; k <= 30; ++k) {
    ell[k] = 0.25;
    h[k] = 0.25;
  }
  Weight km = km_weight_1d(KmRule::table(ell, h));
  SparseCollection nest;
  for (int g = 0; g <= 4; ++g) nest.entries.push_back({DyadicCube(g, {0}), {}});
  SparseCollection shifted;
  for (int g = 0; g <= 4; ++g)
    shifted.entries.push_back({DyadicCube(g, {std::int64_t{4} << g}), {}});
  StepFunction1D ftr = f.translated(4.0);
  double a = corollary_norm_ratio(nest, f, km, 1.5, 2.0);
  double b = corollary_norm_ratio(shifted, ftr, km, 1.5, 2.0);
  CHECK(std::isfinite(a));
  CHECK(a == doctest::Approx(b).epsilon(1e-6));
}

TEST_CASE("carleson embedding check") {
  Weight one = Weight::constant(1.0);
  StepFunction1D h = StepFunction1D::indicator(0, 1);

  // single cube with a_Q = w(Q)
  std::vector<std::pair<DyadicCube, double>> fam{{DyadicCube(0, {0}), 1.0}};
  auto res = carleson_check(fam, one, h, 2.0);
  CHECK(res.a_found == doctest::Approx(1.0));
  CHECK(res.holds);

  // full dyadic tree of depth 5 with a_Q = |E_Q| for disjoint E_Q: A <= 1
  std::vector<std::pair<DyadicCube, double>> tree;
  for (int g = 0; g <= 5; ++g)
    for (long long z = 0; z < (1ll << g); ++z)
      tree.emplace_back(DyadicCube(g, {z}), std::ldexp(1.0, -g) / 8.0);  // 1/8 of each cube
  auto res2 = carleson_check(tree, one, h, 2.0);
  CHECK(res2.a_found <= 1.0 + 1e-12);
  CHECK(res2.holds);

  // the S_2 coefficient shape from the sparse-form split, on a KM weight
  Weight km = km_weight_1d(KmRule::geometric_power(2.0));
  double p = 1.5, q = 2.0, delta = 0.5;
  double s = 1.0 + delta / (8.0 * p), rr = 1.0 + 1.0 / (4.0 * p);
  double expo = (p / (p - 1.0)) / (s * rr) - 1.0;
  std::vector<std::pair<DyadicCube, double>> fam3;
  for (int g = 0; g <= 4; ++g) {
    DyadicCube c(g, {0});
    Cube cc = c.cube();
    double wq = km.integrate_cube(cc).value;
    double tail = tail_functional(cc, km, PsiFunction::power(q)).value;
    if (wq > 0) fam3.emplace_back(c, wq * std::pow(wq / tail, expo));
  }
  auto res3 = carleson_check(fam3, km, km.to_step(-2, 2), 2.0);
  CHECK(std::isfinite(res3.a_found));
  CHECK(res3.holds);
  MESSAGE("carleson A on KM weight: ", res3.a_found);
}

TEST_CASE("maximal_lp_mass anchors") {
  Weight one = Weight::constant(1.0);
  StepFunction1D f = StepFunction1D::indicator(0, 1);
  // int (Mf)^2 = 1 + 2 int_0^inf (1+t)^-2 dt = 3
  auto m = maximal_lp_mass(f, 2.0, one);
  CHECK(m.value == doctest::Approx(3.0).epsilon(1e-6));
  CHECK_FALSE(maximal_lp_mass(f, 1.0, one).finite);

  // exact on a compact weight window
  Weight ind = Weight::step(StepFunction1D::indicator(-1, 2));
  auto inner = maximal_lp_mass(f, 2.0, ind);
  auto oracle = integrate_gk([&](double x) { return std::pow(m_stepfn_eval(f, x), 2.0); }, -1, 2,
                             {1e-12, 0.0, 2000});
  CHECK(inner.value == doctest::Approx(oracle.value).epsilon(1e-9));
}
