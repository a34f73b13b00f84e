#pragma once

#include <optional>

#include "igo/core/family.hpp"
#include "igo/fisher/fisher.hpp"

namespace igo {

struct KlEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  Index samples = 0;
};

/// Monte-Carlo estimate of KL(P_before || P_after) from points drawn from
/// P_before: the mean of ln P_before(x) - ln P_after(x).
KlEstimate estimate_kl(const Family& family, const Vector& before, const Vector& after,
                       const Samples& points_from_before);

/// KL(P_from || P_to) by summing over the family's support.
double exact_kl(const Family& family, const Vector& from, const Vector& to);

struct StepReport {
  Vector theta_before;
  Vector theta_after;
  double kl_estimate = 0.0;
  double kl_standard_error = 0.0;
  Index kl_samples = 0;
  /// sqrt(dtheta^T I dtheta) with I taken at theta_before.
  double fisher_step_norm = 0.0;
  /// Fisher-metric cosine with the previous step; absent for zero-length steps.
  std::optional<double> cosine_with_previous;
};

/// Builds the report for the step theta_before -> theta_after. `kl_points`
/// are draws from P_before (the update batch by default, or a fresh sample).
StepReport step_diagnostics(const Family& family, const Matrix& fisher_before,
                            const Vector& theta_before, const Vector& theta_after,
                            const Samples& kl_points,
                            const std::optional<Vector>& previous_step = std::nullopt);

enum class AdaptRule {
  /// dt exp(beta cos / 2).
  cosine,
  /// dt exp(beta (1{cos > 0} - 1{cos < 0}) / 2).
  sign,
};

/// min(N / dim_theta, 1/2).
double default_adapt_beta(Index samples_per_step, Index dim_theta);

/// Returns dt unchanged when the report has no cosine.
double adapt_dt(const StepReport& report, double dt, double beta, AdaptRule rule = AdaptRule::cosine);

}  // namespace igo
