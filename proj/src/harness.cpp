#include "cpw/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "cpw/marcinkiewicz.hpp"
#include "cpw/maximal.hpp"
#include "cpw/singular.hpp"
#include "cpw/sparse.hpp"
#include "cpw/weights.hpp"

namespace cpw {

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  std::vector<std::string> problems;
  if (j.contains("suite")) {
    if (!j["suite"].is_string()) problems.push_back("suite: expected a string");
    else c.suite = j["suite"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      problems.push_back("seed: expected an integer");
    else c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) problems.push_back("params: expected an object");
    else c.params = j["params"];
  }
  auto check_exponent = [&](const char* key, double lo) {
    if (c.params.contains(key)) {
      if (!c.params[key].is_number()) problems.push_back(std::string(key) + ": expected a number");
      else if (!(c.params[key].get<double>() > lo))
        problems.push_back(std::string(key) + ": must be > " + std::to_string(lo));
    }
  };
  check_exponent("p", 0.0);
  check_exponent("q", 1.0);
  check_exponent("eps", 0.0);
  check_exponent("delta", 0.0);
  if (c.params.contains("theta")) {
    double th = c.params["theta"].is_number() ? c.params["theta"].get<double>() : -1.0;
    if (!(th > 0.0 && th < 1.0)) problems.push_back("theta: must lie in (0,1)");
  }
  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw std::invalid_argument(msg);
  }
  return c;
}

json ExperimentConfig::to_json() const {
  return json{{"suite", suite}, {"seed", seed}, {"params", params}};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.suite = name;
  if (name == "acceptance") return c;
  if (name == "km-divergence") {
    c.params = json{{"p", 2.0}, {"k_max", 20}};
    return c;
  }
  if (name == "cf-sweep") {
    c.params = json{{"p", 2.0}, {"functions", 20}};
    return c;
  }
  if (name == "km-geometric") {
    c.suite = "km-divergence";
    c.params = json{{"rule", "geometric"}, {"p", 2.0}, {"k_max", 20}};
    return c;
  }
  if (name == "km-harmonic") {
    c.suite = "km-divergence";
    c.params = json{{"rule", "harmonic"}, {"p", 2.0}, {"k_max", 20}};
    return c;
  }
  if (name == "empty") return c;
  std::string names;
  for (const auto& n : preset_names()) names += " " + n;
  throw std::invalid_argument("unknown preset '" + name + "'; available:" + names);
}

std::vector<std::string> preset_names() {
  return {"acceptance", "km-divergence", "cf-sweep", "km-geometric", "km-harmonic", "empty"};
}

namespace {

Report km_divergence_suite(const ExperimentConfig& cfg) {
  Report rep;
  rep.suite = cfg.suite;
  rep.seed = cfg.seed;
  rep.config_echo = cfg.to_json();
  double p = cfg.params.value("p", 2.0);
  long long k_max = cfg.params.value("k_max", 20);
  std::string rule_name = cfg.params.value("rule", "geometric");
  KmRule rule = rule_name == "harmonic" ? KmRule::harmonic_power(p) : KmRule::geometric_power(p);
  KmRule rule_phi = KmRule::geometric_phi(p);
  if (rule_name == "harmonic") {
    rule_phi = KmRule::harmonic_power(p);
    rule_phi.h_kind = KmRule::HKind::PhiOverEll;
  }
  Weight w_pow = km_weight_1d(rule);
  Weight w_phi = km_weight_1d(rule_phi);
  for (long long k = 0; k <= k_max; ++k) {
    ReportRow row;
    row.id = "k=" + std::to_string(k);
    Cube omega = km_hole_cube(rule, k);
    row.metrics.emplace_back("ell", rule.ell(k));
    row.metrics.emplace_back("hole_ratio_power_p", hole_ratio(omega, w_pow, PsiFunction::power(p)));
    row.metrics.emplace_back("hole_ratio_power_p1", hole_ratio(omega, w_pow, PsiFunction::power(p + 1)));
    row.metrics.emplace_back("hole_ratio_phi_p_powerweight",
                             hole_ratio(omega, w_pow, PsiFunction::phi(p)));
    row.metrics.emplace_back("hole_ratio_phi_p_phiweight",
                             hole_ratio(km_hole_cube(rule_phi, k), w_phi, PsiFunction::phi(p)));
    rep.rows.push_back(std::move(row));
  }
  rep.summary["k_max"] = k_max;
  return rep;
}

Report cf_sweep_suite(const ExperimentConfig& cfg) {
  Report rep;
  rep.suite = cfg.suite;
  rep.seed = cfg.seed;
  rep.config_echo = cfg.to_json();
  double p = cfg.params.value("p", 2.0);
  int n = cfg.params.value("functions", 20);
  Rng rng(cfg.seed);
  Weight w = km_weight_1d(KmRule::geometric_phi(p));
  double mx = 0.0;
  for (int i = 0; i < n; ++i) {
    auto f = random_step_function(rng, static_cast<int>(rng.uniform_int(2, 4)), -10, 10, 0.2, 4.0);
    auto hn = hilbert_lp_norm(f, p, w);
    auto mn = maximal_lp_mass(f, p, w);
    double m_norm = std::pow(mn.value, 1.0 / p);
    double ratio = hn.value / m_norm;
    mx = std::max(mx, ratio);
    ReportRow row;
    row.id = "f" + std::to_string(i);
    row.metrics.emplace_back("hilbert_norm", hn.value);
    row.metrics.emplace_back("maximal_norm", m_norm);
    row.metrics.emplace_back("cf_ratio", ratio);
    row.error_bound = hn.error;
    rep.rows.push_back(std::move(row));
  }
  rep.summary["max_ratio"] = mx;
  return rep;
}

}  // namespace

Report run_suite(const ExperimentConfig& config) {
  Report rep;
  rep.suite = config.suite;
  rep.seed = config.seed;
  rep.config_echo = config.to_json();
  if (config.suite == "empty") return rep;
  if (config.suite == "acceptance") {
    auto results = run_acceptance(config.seed);
    int failures = 0;
    for (const auto& r : results) {
      ReportRow row;
      row.id = "criterion " + std::to_string(r.id);
      row.pass = r.pass;
      row.note = r.name + ": " + r.detail;
      if (!r.pass) ++failures;
      rep.rows.push_back(std::move(row));
    }
    rep.overall_pass = failures == 0;
    rep.summary["failures"] = failures;
    rep.summary["criteria"] = results.size();
    return rep;
  }
  if (config.suite == "km-divergence") return km_divergence_suite(config);
  if (config.suite == "cf-sweep") return cf_sweep_suite(config);
  std::string names;
  for (const auto& n : preset_names()) names += " " + n;
  throw std::invalid_argument("invalid config:\n  - suite: unknown name '" + config.suite +
                              "'; available:" + names);
}

namespace {

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string report_to_json(const Report& r) {
  json j;
  j["suite"] = r.suite;
  j["version"] = r.version;
  j["seed"] = r.seed;
  j["config"] = r.config_echo;
  j["overall_pass"] = r.overall_pass;
  j["summary"] = r.summary;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr;
    jr["id"] = row.id;
    json metrics;
    for (const auto& [k, v] : row.metrics) metrics[k] = v;
    jr["metrics"] = metrics;
    if (row.error_bound) jr["error_bound"] = *row.error_bound;
    if (row.pass) jr["pass"] = *row.pass;
    if (!row.note.empty()) jr["note"] = row.note;
    rows.push_back(jr);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const Report& r) {
  // union of metric names, sorted, one row per case
  std::vector<std::string> cols;
  for (const auto& row : r.rows)
    for (const auto& [k, v] : row.metrics)
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  std::sort(cols.begin(), cols.end());
  std::string out = "id";
  for (const auto& c : cols) out += "," + c;
  out += ",error_bound,pass,note\n";
  for (const auto& row : r.rows) {
    out += row.id;
    for (const auto& c : cols) {
      out += ",";
      for (const auto& [k, v] : row.metrics)
        if (k == c) out += num17(v);
    }
    out += ",";
    if (row.error_bound) out += num17(*row.error_bound);
    out += ",";
    if (row.pass) out += *row.pass ? "1" : "0";
    out += ",";
    std::string note = row.note;
    std::replace(note.begin(), note.end(), ',', ';');
    out += note + "\n";
  }
  return out;
}

void write_report(const Report& r, const std::string& out_dir, const std::string& format) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::string path = out_dir + "/" + r.suite + "." + format;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report to " + path);
  if (format == "json")
    out << report_to_json(r);
  else if (format == "csv")
    out << report_to_csv(r);
  else
    throw std::invalid_argument("unknown report format '" + format + "' (json|csv)");
}

}  // namespace cpw
