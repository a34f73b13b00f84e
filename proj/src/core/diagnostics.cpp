#include "igo/core/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace igo {

KlEstimate estimate_kl(const Family& family, const Vector& before, const Vector& after,
                       const Samples& points_from_before) {
  const Index n = points_from_before.cols();
  KlEstimate out;
  out.samples = n;
  if (n == 0) return out;
  const Vector diff = family.log_density(before, points_from_before) -
                      family.log_density(after, points_from_before);
  out.value = diff.mean();
  if (n > 1) {
    const double var = (diff.array() - out.value).square().sum() / static_cast<double>(n - 1);
    out.standard_error = std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

double exact_kl(const Family& family, const Vector& from, const Vector& to) {
  const Support s = family.support(from);
  const Vector diff = family.log_density(from, s.points) - family.log_density(to, s.points);
  double kl = 0.0;
  for (Index k = 0; k < s.probabilities.size(); ++k)
    if (s.probabilities(k) > 0.0) kl += s.probabilities(k) * diff(k);
  return kl;
}

StepReport step_diagnostics(const Family& family, const Matrix& fisher_before,
                            const Vector& theta_before, const Vector& theta_after,
                            const Samples& kl_points, const std::optional<Vector>& previous_step) {
  StepReport r;
  r.theta_before = theta_before;
  r.theta_after = theta_after;
  const Vector step = theta_after - theta_before;
  r.fisher_step_norm = fisher_norm(fisher_before, step);
  const KlEstimate kl = estimate_kl(family, theta_before, theta_after, kl_points);
  r.kl_estimate = kl.value;
  r.kl_standard_error = kl.standard_error;
  r.kl_samples = kl.samples;
  if (previous_step && previous_step->size() == step.size()) {
    const double prev_norm = fisher_norm(fisher_before, *previous_step);
    if (r.fisher_step_norm > 0.0 && prev_norm > 0.0) {
      const double c = previous_step->dot(fisher_before * step) / (prev_norm * r.fisher_step_norm);
      r.cosine_with_previous = std::clamp(c, -1.0, 1.0);
    }
  }
  return r;
}

double default_adapt_beta(Index samples_per_step, Index dim_theta) {
  return std::min(static_cast<double>(samples_per_step) / static_cast<double>(dim_theta), 0.5);
}

double adapt_dt(const StepReport& report, double dt, double beta, AdaptRule rule) {
  if (!report.cosine_with_previous) return dt;
  const double c = *report.cosine_with_previous;
  const double signal = rule == AdaptRule::cosine ? c : (c > 0.0 ? 1.0 : 0.0) - (c < 0.0 ? 1.0 : 0.0);
  return dt * std::exp(beta * signal / 2.0);
}

}  // namespace igo
