#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpw/rng.hpp"
#include "cpw/serde.hpp"

namespace cpw {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct ExperimentConfig {
  std::string suite = "acceptance";
  std::uint64_t seed = 1;
  json params = json::object();

  static ExperimentConfig from_json(const json& j);
  json to_json() const;
};

/// Named experiment fragments. Unknown names raise with the list of
/// available presets.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

struct ReportRow {
  std::string id;
  // insertion-ordered metric names with values; serialized sorted by key
  std::vector<std::pair<std::string, double>> metrics;
  std::optional<double> error_bound;
  std::optional<bool> pass;
  std::string note;
};

struct Report {
  std::string suite;
  std::string version = kToolkitVersion;
  std::uint64_t seed = 0;
  json config_echo;
  std::vector<ReportRow> rows;
  json summary = json::object();
  bool overall_pass = true;
};

/// Executes the named experiment battery deterministically for the fixed
/// seed. Invalid configs raise std::invalid_argument listing every violated
/// precondition.
Report run_suite(const ExperimentConfig& config);

/// Bit-stable serializations: sorted keys, shortest-round-trip floats (JSON)
/// and %.17g (CSV).
std::string report_to_json(const Report& r);
std::string report_to_csv(const Report& r);
void write_report(const Report& r, const std::string& out_dir, const std::string& format);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The acceptance battery; one result per criterion.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed);

/// Seeded step-function generator shared by sweeps and tests: `pieces`
/// random constant pieces supported inside [lo, hi], values in [vmin, vmax].
StepFunction1D random_step_function(Rng& rng, int pieces, double lo, double hi, double vmin,
                                    double vmax);

}  // namespace cpw
