#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "igo/cli/config.hpp"
#include "igo/core/family.hpp"
#include "igo/core/weights.hpp"
#include "igo/objectives/objectives.hpp"

namespace igo {

/// Parsed family, objective and weighting of a configuration.
struct Problem {
  FamilyPtr family;
  std::string family_kind;
  ObjectivePtr objective;
  /// Absent for rank-position (PBIL) schedules.
  std::optional<WeightScheme> scheme;
  Index pbil_mu = 0;
  QuantileRule rule = QuantileRule::cell_integral;
  /// RBM layer sizes (0 for other families).
  Index rbm_nx = 0;
  Index rbm_nh = 0;
  /// The affine chart used when the RBM family is centered.
  std::optional<Matrix> rbm_chart;
};

/// Family specs: `bernoulli:d=`, `bernoulli_logit:d=`, `gaussian:d=`,
/// `gaussian_expectation:d=`, `isotropic_gaussian:d=[;grid=]`,
/// `gaussian_mean:d=[;grid=]`, `rbm:nx=;nh=[;param=centered]`,
/// `rbm_marginal:nx=;nh=`. Any family accepts `lift=uniform`.
/// Scheme specs: `truncation:q=`, `signed_median`, `table:nodes=q1,v1,q2,v2,...`,
/// `pbil:mu=`, each with optional `scale=` and `shift=`.
Problem build_problem(const ExperimentConfig& config);

WeightScheme parse_scheme(const std::string& spec);

/// Seed owned by repeat `run_id`.
std::uint64_t run_seed(std::uint64_t master, Index run_id);

/// Initial parameters of one repeat.
Vector initial_theta(const ExperimentConfig& config, const Problem& problem, std::uint64_t seed);

enum class RunStatus { converged, both_optima_reached, failed_singular, failed_unreliable, step_limit };

std::string status_name(RunStatus status);
bool is_failure(RunStatus status);

struct RunRow {
  Index run_id = 0;
  Index step = 0;
  double time = 0.0;
  double best_f = 0.0;
  double quantile_f = 0.0;
  double dist_second = 0.0;  // NaN unless two_min
  double mean_h = 0.0;       // NaN unless RBM on the joint space
  double kl = 0.0;           // NaN when no update was made
  double kl_se = 0.0;
  double speed = 0.0;        // Fisher norm of the step divided by dt
  double dt = 0.0;
  std::string reliability;   // exact | pass | fail | none
};

struct RunRecord {
  Index run_id = 0;
  std::uint64_t seed = 0;
  std::vector<RunRow> rows;
  /// theta before step k (index k), plus the final theta; kept only on request.
  std::vector<Vector> thetas;
  Vector final_theta;
  std::optional<RunStatus> status;
  Index both_optima_step = -1;
  std::string failure;
  double weight_variance = 0.0;

  void set_status(RunStatus s);
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunRecord> runs;

  Index failures() const;
};

RunRecord run_single(const ExperimentConfig& config, const Problem& problem, Index run_id,
                     bool keep_thetas = false);

/// All repeats, on a worker pool, sorted by run_id.
ExperimentResult run_experiment(const ExperimentConfig& config, bool keep_thetas = false);

struct FlowPoint {
  double t = 0.0;
  Vector theta;
  /// q-quantile of f under P_theta (q from the truncation scheme, 1/2 otherwise).
  double quantile_f = 0.0;
  double mean_f = 0.0;
};

struct FlowResult {
  ExperimentConfig config;
  std::vector<FlowPoint> points;
};

/// Integrates the exact flow over the family's support from the configured
/// initial state, reporting `checkpoints` evenly spaced states (every step when 0).
FlowResult run_flow(const ExperimentConfig& config);

void write_flow_csv(std::ostream& out, const FlowResult& result);

/// Percentile with linear interpolation between order statistics (p in [0, 100]).
double percentile(std::vector<double> values, double p);

void write_runs_csv(std::ostream& out, const ExperimentResult& result);
void write_summary_csv(std::ostream& out, const ExperimentResult& result);
void write_status_csv(std::ostream& out, const ExperimentResult& result);

/// Writes <dir>/<name>_{runs,summary,status}.csv and returns the paths.
std::vector<std::string> write_outputs(const ExperimentResult& result, const std::string& directory);

/// 17-significant-digit formatting; "nan" for NaN.
std::string format_number(double v);

}  // namespace igo
