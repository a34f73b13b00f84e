#pragma once

#include <memory>
#include <string>

#include "igo/core/random.hpp"
#include "igo/core/types.hpp"

namespace igo {

struct Capabilities {
  bool exact_fisher = false;
  bool expectation_params = false;
  bool latent = false;
  bool enumerable = false;
};

/// Weighted atoms representing P_theta: exact for discrete families, a
/// quadrature grid for continuous ones (exact == false).
struct Support {
  Samples points;
  Vector probabilities;
  bool exact = true;
};

/// A parametric family of distributions on a search space, with a flat
/// parameter vector theta.
///
/// Points are real vectors (bitstrings use 0/1 entries). The interface is
/// batch oriented: sampling, scores and log-densities take or return one
/// point per column, so families can prepare per-theta tables once.
class Family {
 public:
  virtual ~Family() = default;

  virtual std::string name() const = 0;
  virtual Index dim_theta() const = 0;
  virtual Index dim_point() const = 0;
  virtual Capabilities capabilities() const = 0;

  /// Throws DomainError when theta is outside the parameter domain.
  virtual void validate(const Vector& theta) const { (void)theta; }

  /// Maps theta back into the admissible domain after an update (identity by default).
  virtual Vector project(const Vector& theta) const { return theta; }

  /// Draws `count` points; point i uses streams.stream(i) only.
  virtual Samples sample(const Vector& theta, Index count, const StreamFactory& streams) const = 0;

  /// d ln P_theta(x) / d theta, one column per point (dim_theta x N).
  virtual Matrix score(const Vector& theta, const Samples& points) const = 0;

  virtual Vector log_density(const Vector& theta, const Samples& points) const = 0;

  virtual Matrix exact_fisher(const Vector& theta) const;

  virtual Support support(const Vector& theta) const;

  /// Sufficient statistics T(x), one column per point.
  virtual Matrix sufficient_statistics(const Samples& points) const;

  /// theta -> E_theta T.
  virtual Vector to_expectation(const Vector& theta) const;

  /// E T -> theta. Throws DegenerateUpdate outside the valid domain.
  virtual Vector from_expectation(const Vector& mean_statistics) const;

  /// argmax_theta sum_i w_i ln P_theta(x_i) for non-negative weights.
  /// Default goes through expectation parameters.
  virtual Vector max_likelihood(const Samples& points, const Vector& weights) const;

  /// Minimum number of distinct weighted points for a non-degenerate ML estimate.
  virtual Index min_ml_points() const { return 1; }

  Vector score(const Vector& theta, const Vector& point) const;
};

using FamilyPtr = std::shared_ptr<const Family>;

}  // namespace igo
