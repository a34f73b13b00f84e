#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "igo/core/types.hpp"

namespace igo {

/// Flat `key = value` experiment description. Every key is optional; unknown
/// keys are rejected by the parser.
struct ExperimentConfig {
  std::string name = "experiment";

  // Problem.
  std::string family = "bernoulli:d=10";
  std::string objective = "onemax:d=10";
  std::string scheme = "truncation:q=0.5";
  std::string quantile_rule = "cell_integral";

  // Algorithm.
  std::string algorithm = "igo";
  Index samples = 100;
  double dt = 0.1;
  Index steps = 100;
  Index repeats = 1;
  std::uint64_t seed = 1;
  std::string fisher = "exact";
  Index fisher_samples = 10000;
  bool reliability = true;
  bool reliability_log_symmetric = false;
  std::optional<double> ridge;
  std::string weight_sum = "strict";
  std::string smoothing = "expectation";
  double eta_m = -1.0;  // negative: use dt
  double eta_c = -1.0;
  double ladder_j = 1.0;

  // Initial state.
  std::optional<Vector> theta0;
  std::optional<Vector> mean0;
  double sigma0 = 1.0;

  // Stopping and diagnostics.
  std::string stop = "none";
  double target = 0.0;
  bool kl = true;
  bool adapt_dt = false;
  std::string adapt_rule = "cosine";
  std::string rbm_sampler = "exact";
  Index gibbs_burn_in = 100;
  Index threads = 0;
  bool paper_scale = false;

  // Flow subcommand.
  double horizon = 1.0;
  double flow_step = 0.01;
  std::string integrator = "rk4";
  Index checkpoints = 0;
  Index grid_nodes = 64;
  std::string quantile_mode = "midpoint";
};

/// Parses the text format; throws InvalidInput with the line number on error.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_string(const std::string& text);

/// Checks cross-field consistency (positive sizes, known enum values, specs that parse).
void validate_config(const ExperimentConfig& config);

/// Switches an RBM two-min configuration to the full-size protocol
/// (40 visible units, 10000 samples per step, 100 repeats).
ExperimentConfig with_paper_scale(ExperimentConfig config);

}  // namespace igo
