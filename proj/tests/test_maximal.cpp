#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "cpw/maximal.hpp"
#include "cpw/rng.hpp"
#include "cpw/weights.hpp"

using namespace cpw;

TEST_CASE("m_indicator closed form in 1D") {
  Cube q = Cube::interval(0, 1);
  CHECK(m_indicator(q, {2.0}) == doctest::Approx(0.5));
  CHECK(m_indicator(q, {0.5}) == 1.0);
  CHECK(m_indicator(q, {-3.0}) == doctest::Approx(0.25));
}

TEST_CASE("m_indicator 2D anchor") {
  Cube q({0.0, 0.0}, 1.0);
  CHECK(m_indicator(q, {2.0, 0.5}) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(m_indicator(q, {0.3, 0.7}) == 1.0);
}

TEST_CASE("m_stepfn_eval matches the indicator closed form") {
  StepFunction1D f = StepFunction1D::indicator(0, 1);
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    double x = rng.uniform(-6, 7);
    CHECK(m_stepfn_eval(f, x) ==
          doctest::Approx(m_indicator(Cube::interval(0, 1), {x})).epsilon(1e-13));
  }
}

TEST_CASE("m_stepfn_eval two-bump candidate search") {
  StepFunction1D f({0, 1, 2, 3}, {1, 0, 1});
  CHECK(m_stepfn_eval(f, 1.5) == doctest::Approx(2.0 / 3.0));
  CHECK(m_stepfn_eval(StepFunction1D::zero(), 0.3) == 0.0);
}

TEST_CASE("m_stepfn_eval dominates f and is monotone in f") {
  Rng rng(32);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> b{rng.uniform(-3, -1), rng.uniform(-1, 1), rng.uniform(1, 3)};
    std::sort(b.begin(), b.end());
    std::vector<double> v{rng.uniform(0, 2), rng.uniform(0, 2)};
    StepFunction1D f(b, v);
    std::vector<double> v2(v);
    for (auto& x : v2) x += rng.uniform(0, 1);
    StepFunction1D g(b, v2);
    for (int j = 0; j < 20; ++j) {
      double x = rng.uniform(-4, 4);
      double mf = m_stepfn_eval(f, x);
      CHECK(mf >= f(x) - 1e-13);
      CHECK(mf <= m_stepfn_eval(g, x) + 1e-13);
    }
  }
}

TEST_CASE("m_s_eval reduces to M at s = 1 and is exact on indicator powers") {
  StepFunction1D f = StepFunction1D::indicator(0, 1);
  CHECK(m_s_eval(f, 1.0, 2.0) == doctest::Approx(0.5));
  CHECK(m_s_eval(f, 2.0, 2.0) == doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS(m_s_eval(f, 0.9, 0.0), std::invalid_argument);

  // two-step f against a brute candidate search on f^3
  StepFunction1D g({-1, 0, 2}, {2.0, 0.5});
  StepFunction1D g3 = g.pow(3.0);
  Rng rng(33);
  for (int i = 0; i < 50; ++i) {
    double x = rng.uniform(-3, 4);
    CHECK(m_s_eval(g, 3.0, x) ==
          doctest::Approx(std::pow(m_stepfn_eval(g3, x), 1.0 / 3.0)).epsilon(1e-12));
  }
}

TEST_CASE("m_localized on simple weights") {
  Cube q = Cube::interval(0, 1);
  Weight one = Weight::constant(1.0);
  CHECK(m_localized(q, one, 0.5) == doctest::Approx(1.0));
  CHECK(m_localized(q, one, 2.0) == doctest::Approx(0.5));

  // KM weight: matches the candidate search on the materialized restriction
  Weight km = km_weight_1d(KmRule::geometric_power(2.0));
  StepFunction1D restricted = km.to_step(0, 1);
  CHECK(m_localized(q, km, 0.0) == doctest::Approx(m_stepfn_eval(restricted, 0.0)).epsilon(1e-12));
}

TEST_CASE("m_superlevel closed-form intervals") {
  StepFunction1D f = StepFunction1D::indicator(0, 1);
  OpenSet s = m_superlevel(f, 0.5);
  REQUIRE(s.boxes().size() == 1);
  CHECK(s.boxes()[0].lo[0] == doctest::Approx(-1.0));
  CHECK(s.boxes()[0].hi[0] == doctest::Approx(2.0));

  CHECK(m_superlevel(f, 2.0).is_empty());

  OpenSet s4 = m_superlevel(f, 0.25);
  REQUIRE(s4.boxes().size() == 1);
  CHECK(s4.boxes()[0].lo[0] == doctest::Approx(-3.0));
  CHECK(s4.boxes()[0].hi[0] == doctest::Approx(4.0));

  CHECK_THROWS_AS(m_superlevel(f, 0.0), std::invalid_argument);
}

TEST_CASE("m_superlevel agrees with dense sampling") {
  Rng rng(34);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<double> b;
    int pieces = 2 + static_cast<int>(rng.uniform_int(0, 2));
    for (int i = 0; i <= pieces; ++i) b.push_back(rng.uniform(-4, 4));
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
      if (b[i + 1] - b[i] < 1e-3) b[i + 1] = b[i] + 1e-3;
    std::vector<double> v;
    for (int i = 0; i < pieces; ++i) v.push_back(rng.uniform(0, 3));
    v[static_cast<std::size_t>(rng.uniform_int(0, pieces - 1))] = 2.5;
    StepFunction1D f(b, v);
    double lambda = rng.uniform(0.05, 2.0);
    OpenSet s = m_superlevel(f, lambda);
    // sampling oracle on a 10^4 grid; skip points within one cell of a boundary
    int misclassified = 0;
    double lo = b.front() - 40, hi = b.back() + 40;
    double h = (hi - lo) / 10000;
    for (int i = 0; i <= 10000; ++i) {
      double x = lo + h * i;
      bool in = s.contains({x});
      bool above = m_stepfn_eval(f, x) > lambda;
      if (in != above) {
        double dist = 1e300;
        for (const auto& bx : s.boxes())
          dist = std::min({dist, std::abs(x - bx.lo[0]), std::abs(x - bx.hi[0])});
        if (dist > h) ++misclassified;
      }
    }
    CHECK(misclassified == 0);
  }
}

TEST_CASE("superlevel nesting in lambda") {
  StepFunction1D f({-2, 0, 1, 3}, {0.7, 2.2, 1.1});
  OpenSet big = m_superlevel(f, 0.3);
  OpenSet small = m_superlevel(f, 0.9);
  CHECK(small.subset_of_ae(big, 1e-12));
}

TEST_CASE("hl_bound experiment: M1_Q <= (C/eta) M1_E pointwise") {
  // E = union of pieces of Q with |E| = eta |Q|
  Cube q = Cube::interval(0, 4);
  OpenSet e = OpenSet::intervals({{0.0, 1.0}, {2.0, 3.0}});
  double eta = e.measure() / q.volume();
  StepFunction1D ind_e = StepFunction1D::indicator(e);
  double worst_c = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    double x = -20.0 + 44.0 * i / 2000.0;
    double mq = m_indicator(q, {x});
    double me = m_stepfn_eval(ind_e, x);
    REQUIRE(me > 0.0);
    worst_c = std::max(worst_c, eta * mq / me);
  }
  CHECK(std::isfinite(worst_c));
  // the empirical constant is reported, not pinned by the statement
  MESSAGE("empirical hl_bound constant: ", worst_c);
  CHECK(worst_c < 50.0);
}
