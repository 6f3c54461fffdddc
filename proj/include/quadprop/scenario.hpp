#pragma once

#include <map>
#include <ostream>
#include <string>

#include "quadprop/emp.hpp"
#include "quadprop/profiles.hpp"

namespace quadprop {

// Shared knobs for every subcommand.  A config file with "key = value" lines
// (same keys as the long CLI flags, plus param.NAME entries) can pre-populate
// the structure; explicit flags override it.
struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
  double root_tol = 1e-12;
};

struct ScenarioConfig {
  std::string profile = "constant";
  std::map<std::string, double> params;
  double omega_bar = 1.0;
  double hbar = 1.0;
  double t_min = 0.0;
  double t_max = 10.0;
  int grid = 200;
  std::string out;  // empty: write to stdout
  std::string format = "csv";
  Tolerances tol;
};

// Throws std::invalid_argument on malformed or unknown keys, std::runtime_error
// when the file cannot be read.
void apply_config_file(ScenarioConfig& cfg, const std::string& path);

void validate_config(const ScenarioConfig& cfg);

SystemProfile profile_from_config(const ScenarioConfig& cfg);

// Each runner writes one artifact (CSV or JSON per cfg.format, caustics always
// JSON) with a header block recording config, tolerances, and check outcomes.
// Return value is the process exit code: 0 clean, 2 when the reduction
// invariants failed verification (the file is still written, with a warning).
// Pipeline failures surface as exceptions; the CLI maps them to exit 1.
int run_emp(const ScenarioConfig& cfg, std::ostream& os);
int run_caustics(const ScenarioConfig& cfg, std::ostream& os);
int run_density(const ScenarioConfig& cfg, std::ostream& os);
int run_phase(const ScenarioConfig& cfg, double a, std::ostream& os);
int run_trajectory(const ScenarioConfig& cfg, double a, double b, std::ostream& os);
int run_evolve(const ScenarioConfig& cfg, double center, double width, double momentum,
               double t2, std::ostream& os);

}  // namespace quadprop
