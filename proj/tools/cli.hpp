#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "invis/skew_system.hpp"

namespace invis::cli {

/// Bad configuration or usage; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  int n = 10;
  BaseKind base = BaseKind::Bernoulli;
  double lambda = 0.05;
  double R = 2.0;
  std::uint64_t steps = 100'000'000;
  std::uint64_t solenoid_steps = 1'000'000'000;
  std::int64_t burn_in = -1;
  std::vector<std::uint64_t> seeds{1};
  int shards = 16;

  double budget = -1.0;  // negative: 1/(4 n^2)
  int perturb_count = 20;
  std::uint64_t perturb_steps = 100'000'000;
  int harmonics = 3;
  int window = 2;

  double alpha = 0.25;
  double eta = -1.0;  // negative: automatic search
  int cone_samples = 10'000;

  int arc_samples = 1000;
  int arc_depth = 60;

  int threshold_n_min = 5;
  int threshold_n_max = 200;

  int exhaustive_bernoulli_n = 6;
  int exhaustive_bernoulli_depth = 12;
  int exhaustive_solenoid_n = 5;
  int exhaustive_solenoid_depth = 10;
  int exhaustive_grid = 64;

  std::string out = "out";
  int threads = 0;

  static ExperimentConfig from_json(const nlohmann::json& j);
  /// Numeric content only (no output directory, no thread count).
  nlohmann::json to_json() const;
  double resolved_budget() const { return budget < 0 ? 1.0 / (4.0 * n * n) : budget; }
  /// Throws ConfigError on any violated invariant.
  void validate() const;
  std::string hash_hex() const;
};

/// Parses arguments and runs a subcommand; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_verify(const ExperimentConfig& config, std::ostream& out);
int cmd_simulate(const ExperimentConfig& config, std::ostream& out, std::uint64_t dump_steps);
int cmd_attractor(const ExperimentConfig& config, std::ostream& out);
int cmd_cones(const ExperimentConfig& config, std::ostream& out);
int cmd_thresholds(const ExperimentConfig& config, std::ostream& out);

}  // namespace invis::cli
