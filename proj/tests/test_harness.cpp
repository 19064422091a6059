#include <doctest.h>

#include <stdexcept>

#include "cpw/harness.hpp"
#include "cpw/serde.hpp"

using namespace cpw;

TEST_CASE("presets") {
  auto g = preset("km-geometric");
  CHECK(g.params.at("rule") == "geometric");
  // ell_0 = 1/2 under the geometric rule
  CHECK(KmRule::geometric_power(2.0).ell(0) == 0.5);
  CHECK(KmRule::harmonic_power(2.0).ell(0) == 0.5);

  CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
  try {
    preset("nope");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("acceptance") != std::string::npos);  // lists the presets
  }
}

TEST_CASE("empty battery returns only the config echo") {
  ExperimentConfig cfg;
  cfg.suite = "empty";
  cfg.seed = 7;
  auto rep = run_suite(cfg);
  CHECK(rep.rows.empty());
  CHECK(rep.overall_pass);
  CHECK(rep.config_echo.at("seed") == 7);
}

TEST_CASE("km-divergence suite is byte-deterministic") {
  ExperimentConfig cfg = preset("km-divergence");
  cfg.seed = 7;
  cfg.params["k_max"] = 6;  // keep the unit test quick
  auto a = report_to_json(run_suite(cfg));
  auto b = report_to_json(run_suite(cfg));
  CHECK(a == b);
  auto csv_a = report_to_csv(run_suite(cfg));
  auto csv_b = report_to_csv(run_suite(cfg));
  CHECK(csv_a == csv_b);
  CHECK(csv_a.find("hole_ratio_power_p") != std::string::npos);
}

TEST_CASE("config validation lists every violation") {
  json bad = {{"suite", "acceptance"},
              {"params", {{"p", -1.0}, {"theta", 2.0}}}};
  try {
    ExperimentConfig::from_json(bad);
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("p:") != std::string::npos);
    CHECK(msg.find("theta:") != std::string::npos);
  }
  CHECK_THROWS_AS(run_suite(ExperimentConfig{"no-such-suite", 1, json::object()}),
                  std::invalid_argument);
}

TEST_CASE("reports round-trip through json") {
  ExperimentConfig cfg = preset("km-divergence");
  cfg.params["k_max"] = 3;
  auto rep = run_suite(cfg);
  auto parsed = json::parse(report_to_json(rep));
  CHECK(parsed.at("suite") == "km-divergence");
  CHECK(parsed.at("rows").size() == rep.rows.size());
  // every row with a certified value carries its error bound
  for (const auto& row : parsed.at("rows")) CHECK(row.contains("metrics"));
}

TEST_CASE("serde round trips") {
  Cube q({-1.5}, 2.0);
  CHECK(cube_from_json(cube_to_json(q)).lower[0] == q.lower[0]);

  OpenSet s = OpenSet::intervals({{0, 1}, {2, 3.5}});
  OpenSet s2 = openset_from_json(openset_to_json(s));
  CHECK(s2.measure() == doctest::Approx(s.measure()));

  StepFunction1D f({0, 1, 2}, {1.0, 3.0}, 0.0, 0.5);
  StepFunction1D f2 = stepfn_from_json(stepfn_to_json(f));
  CHECK(f2.right_tail() == 0.5);
  CHECK(f2.values() == f.values());

  Weight km = km_weight_1d(KmRule::geometric_phi(2.0));
  Weight km2 = weight_from_json(weight_to_json(km));
  CHECK(km2(0.1) == doctest::Approx(km(0.1)));
  CHECK(km2(2.0) == 1.0);

  auto psi = psi_from_json(psi_to_json(PsiFunction::phi(2.0)));
  CHECK(psi.kind() == PsiFunction::Kind::PhiP);

  CHECK_THROWS_AS(weight_from_json(json{{"kind", "mystery"}}), std::invalid_argument);
}

TEST_CASE("random step corpus generator produces valid functions") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    auto f = random_step_function(rng, 4, -8, 8, 0.0, 5.0);
    CHECK(f.compact_support());
    CHECK(f.max_value() > 0.0);
  }
}
