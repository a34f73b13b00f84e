#pragma once

#include <limits>

#include "igo/core/family.hpp"

namespace igo {

struct GaussianParams {
  Vector mean;
  Matrix cov;
};

/// Flat layout: m, then the row-major upper triangle of C.
Vector pack_gaussian(const GaussianParams& params);
GaussianParams unpack_gaussian(const Vector& theta, Index d);

/// Row-major upper triangle of a symmetric matrix, and its inverse.
Vector vech_upper(const Matrix& s);
Matrix unvech_upper(const Vector& v, Index d);

/// (m, C) -> (m, C + m m^T) and back. The inverse throws DegenerateUpdate
/// when the implied covariance is not positive definite.
GaussianParams gaussian_to_expectation(const GaussianParams& params);
GaussianParams gaussian_from_expectation(const GaussianParams& moments);

bool is_positive_definite(const Matrix& c);

/// Full-covariance Gaussian in (m, C) coordinates.
class GaussianFamily final : public Family {
 public:
  explicit GaussianFamily(Index d);

  std::string name() const override { return "gaussian"; }
  Index dim_theta() const override { return d_ + d_ * (d_ + 1) / 2; }
  Index dim_point() const override { return d_; }
  Capabilities capabilities() const override;

  void validate(const Vector& theta) const override;
  Samples sample(const Vector& theta, Index count, const StreamFactory& streams) const override;
  Matrix score(const Vector& theta, const Samples& points) const override;
  Vector log_density(const Vector& theta, const Samples& points) const override;
  Matrix exact_fisher(const Vector& theta) const override;

  /// T(x) = (x, vech(x x^T)).
  Matrix sufficient_statistics(const Samples& points) const override;
  Vector to_expectation(const Vector& theta) const override;
  Vector from_expectation(const Vector& mean_statistics) const override;

  /// Weighted mean and covariance (normalized by the weight sum).
  Vector max_likelihood(const Samples& points, const Vector& weights) const override;
  Index min_ml_points() const override { return d_ + 1; }

  Index dim() const { return d_; }

  using Family::score;

 private:
  Index d_;
};

/// Gaussian parametrized by its expectation parameters (m, vech(C + m m^T)).
class GaussianExpectationFamily final : public Family {
 public:
  explicit GaussianExpectationFamily(Index d);

  std::string name() const override { return "gaussian_expectation"; }
  Index dim_theta() const override { return base_.dim_theta(); }
  Index dim_point() const override { return d_; }
  Capabilities capabilities() const override;

  void validate(const Vector& theta) const override;
  Samples sample(const Vector& theta, Index count, const StreamFactory& streams) const override;
  Matrix score(const Vector& theta, const Samples& points) const override;
  Vector log_density(const Vector& theta, const Samples& points) const override;
  Matrix exact_fisher(const Vector& theta) const override;

  Matrix sufficient_statistics(const Samples& points) const override;
  Vector to_expectation(const Vector& theta) const override { return theta; }
  Vector from_expectation(const Vector& mean_statistics) const override;
  Index min_ml_points() const override { return d_ + 1; }

  /// Expectation coordinates -> (m, C) coordinates.
  Vector to_mean_covariance(const Vector& theta) const;
  /// d(m, vech C) / d(m, vech S).
  Matrix jacobian(const Vector& theta) const;

  using Family::score;

 private:
  Index d_;
  GaussianFamily base_;
};

/// Isotropic Gaussian N(m, sigma^2 I) with parameters (m, ln sigma).
///
/// With grid_nodes > 0 the family exposes a tensor midpoint quadrature grid
/// (z_k = Phi^-1((k + 1/2) / n) per axis) as its support, flagged inexact.
class IsotropicGaussianFamily final : public Family {
 public:
  explicit IsotropicGaussianFamily(Index d, Index grid_nodes = 0);

  std::string name() const override { return "isotropic_gaussian"; }
  Index dim_theta() const override { return d_ + 1; }
  Index dim_point() const override { return d_; }
  Capabilities capabilities() const override;

  void validate(const Vector& theta) const override;
  Samples sample(const Vector& theta, Index count, const StreamFactory& streams) const override;
  Matrix score(const Vector& theta, const Samples& points) const override;
  Vector log_density(const Vector& theta, const Samples& points) const override;
  Matrix exact_fisher(const Vector& theta) const override;
  Support support(const Vector& theta) const override;

  using Family::score;

 private:
  Index d_;
  Index grid_nodes_;
};

/// N(m, I): mean-only Gaussian with identity covariance.
class GaussianMeanFamily final : public Family {
 public:
  explicit GaussianMeanFamily(Index d, Index grid_nodes = 0);

  std::string name() const override { return "gaussian_mean"; }
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
  Vector to_expectation(const Vector& theta) const override { return theta; }
  Vector from_expectation(const Vector& mean_statistics) const override { return mean_statistics; }

  using Family::score;

 private:
  Index d_;
  Index grid_nodes_;
};

/// Tensor midpoint grid of standard normal quantiles, n^d points, equal weights.
Support standard_normal_grid(Index d, Index nodes);

// ---------------------------------------------------------------------------
// Gaussian update rules

/// Weighted elite mean and covariance, normalized by the weight sum.
GaussianParams elite_statistics(const Samples& points, const Vector& weights);

/// m' = m + eta_m sum w (x - m),  C' = C + eta_c sum w ((x - m)(x - m)^T - C).
GaussianParams cma_update(const GaussianParams& params, const Samples& points,
                          const Vector& weights, double eta_m, double eta_c);

/// m' = m*, C' = C* (elite statistics).
GaussianParams emna_update(const Samples& points, const Vector& weights);

/// Covariance ladder C' = (1 - dt) C + dt C* + dt (1 - dt)^j (m* - m)(m* - m)^T,
/// m' = (1 - dt) m + dt m*. j = 0 is CMA, 1 is IGO-ML, infinity is smoothed CEM.
GaussianParams unified_update(const GaussianParams& params, const GaussianParams& elite, double dt,
                              double j);

inline constexpr double kCemLadder = std::numeric_limits<double>::infinity();

/// xNES state: C = A A^T is derived, A is what gets updated.
struct XnesState {
  Vector mean;
  Matrix sqrt_cov;

  Matrix cov() const { return sqrt_cov * sqrt_cov.transpose(); }
};

/// m' = m + eta_m A sum w z,  A' = A exp((eta_c / 2) sum w (z z^T - I)), z = A^-1 (x - m).
XnesState xnes_update(const XnesState& state, const Samples& points, const Vector& weights,
                      double eta_m, double eta_c);

/// Exponential of a symmetric matrix via its eigendecomposition.
Matrix symmetric_exp(const Matrix& s);

enum class GaussianUpdate { cma, emna, xnes, unified };

struct GaussianStepOptions {
  double eta_m = 1.0;
  double eta_c = 1.0;
  double dt = 1.0;
  double j = 1.0;
};

/// Dispatches to the rule `kind`. xnes uses the Cholesky factor of C as A;
/// callers that iterate xnes should keep an XnesState instead.
GaussianParams gaussian_step(GaussianUpdate kind, const GaussianParams& params,
                             const Samples& points, const Vector& weights,
                             const GaussianStepOptions& options);

}  // namespace igo
