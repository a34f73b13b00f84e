#pragma once

#include <span>

#include "igo/core/family.hpp"

namespace igo {

/// Maximum dimension for which a bitstring family enumerates its support.
inline constexpr Index kEnumerationCutoff = 20;

/// All 2^d bitstrings, one per column, bit i of the column index in row i.
Samples enumerate_bitstrings(Index d);

/// Independent Bernoulli measures on {0,1}^d, parametrized by the
/// probabilities theta_i = P(x_i = 1). The theta_i are also the expectation
/// parameters. Updates are clamped to [eps, 1 - eps].
class BernoulliFamily final : public Family {
 public:
  explicit BernoulliFamily(Index d, double clamp_epsilon = 1e-6);

  std::string name() const override { return "bernoulli"; }
  Index dim_theta() const override { return d_; }
  Index dim_point() const override { return d_; }
  Capabilities capabilities() const override;

  void validate(const Vector& theta) const override;
  Vector project(const Vector& theta) const override;

  Samples sample(const Vector& theta, Index count, const StreamFactory& streams) const override;
  Matrix score(const Vector& theta, const Samples& points) const override;
  Vector log_density(const Vector& theta, const Samples& points) const override;
  Matrix exact_fisher(const Vector& theta) const override;
  Support support(const Vector& theta) const override;

  Matrix sufficient_statistics(const Samples& points) const override { return points; }
  Vector to_expectation(const Vector& theta) const override { return theta; }
  Vector from_expectation(const Vector& mean_statistics) const override;

  double clamp_epsilon() const { return eps_; }

  using Family::score;

 private:
  Index d_;
  double eps_;
};

/// Bernoulli measures in the logit parametrization, theta_i = 1 / (1 + exp(-logit_i)).
class BernoulliLogitFamily final : public Family {
 public:
  explicit BernoulliLogitFamily(Index d);

  std::string name() const override { return "bernoulli_logit"; }
  Index dim_theta() const override { return d_; }
  Index dim_point() const override { return d_; }
  Capabilities capabilities() const override;

  void validate(const Vector& theta) const override;

  Samples sample(const Vector& theta, Index count, const StreamFactory& streams) const override;
  Matrix score(const Vector& theta, const Samples& points) const override;
  Vector log_density(const Vector& theta, const Samples& points) const override;
  Matrix exact_fisher(const Vector& theta) const override;
  Support support(const Vector& theta) const override;

  Matrix sufficient_statistics(const Samples& points) const override { return points; }
  Vector to_expectation(const Vector& theta) const override;
  Vector from_expectation(const Vector& mean_statistics) const override;

  using Family::score;

 private:
  Index d_;
};

Vector logistic(const Vector& logits);
Vector logit(const Vector& probabilities);

/// Specialized IGO update for Bernoulli measures on rank-ordered samples:
/// theta'_i = (1 - wbar dt) theta_i + dt sum_j w_j [x_{j:N}]_i, wbar = sum_j w_j,
/// followed by clamping to [eps, 1 - eps]. `ranked` holds samples best first.
Vector bernoulli_igo_update(const Vector& theta, const Samples& ranked,
                            std::span<const double> rank_weights, double dt,
                            double clamp_epsilon = 1e-6);

}  // namespace igo
