#pragma once

#include <optional>

#include "igo/core/family.hpp"
#include "igo/core/weights.hpp"
#include "igo/fisher/fisher.hpp"

namespace igo {

/// sum_i w_i d ln P_theta(x_i) / d theta.
Vector weighted_score(const Family& family, const Vector& theta, const Samples& points,
                      const Vector& weights);

/// theta' = theta + dt I^-1 sum_i w_i d ln P_theta(x_i) / d theta, with the
/// given Fisher matrix. The result is not projected onto the family's domain.
Vector igo_step(const Family& family, const Vector& theta, const Samples& points,
                const RankedWeights& weights, double dt, const FisherMatrix& fisher,
                std::optional<double> ridge = std::nullopt);

/// Same step with the exact Fisher matrix of the family.
Vector igo_step(const Family& family, const Vector& theta, const Samples& points,
                const RankedWeights& weights, double dt);

/// Plain gradient step in the given parametrization (Fisher replaced by the identity).
Vector vanilla_step(const Family& family, const Vector& theta, const Samples& points,
                    const RankedWeights& weights, double dt);

enum class WeightSumPolicy {
  /// Reject weights whose sum differs from 1.
  strict,
  /// Rescale the weights to sum 1, with a warning on the log.
  renormalize,
  /// Keep the weights and use T' = (1 - dt wbar) T + dt sum w T(x).
  general,
};

/// IGO-ML: T' = (1 - dt) T + dt sum_i w_i T(x_i) in expectation parameters,
/// returned in the family's own parametrization.
Vector igo_ml_step(const Family& family, const Vector& theta, const Samples& points,
                   const RankedWeights& weights, double dt,
                   WeightSumPolicy policy = WeightSumPolicy::strict);

/// Number of elites ceil(q N) used by cem_step.
Index elite_count(double q, Index n);

/// Maximum-likelihood fit to the ceil(q N) best points (uniform elite weights).
Vector cem_step(const Family& family, const Samples& points, std::span<const double> values, double q);

enum class Coordinates {
  /// The family's own flat parameter vector (e.g. (m, C) for Gaussians).
  native,
  /// Expectation parameters.
  expectation,
};

/// (1 - alpha) theta + alpha theta_ML, the blend taken in the declared coordinates.
Vector smoothed_cem_step(const Family& family, const Vector& theta, const Samples& points,
                         const RankedWeights& weights, double alpha, Coordinates coordinates);

}  // namespace igo
