#include "igo/core/family.hpp"

namespace igo {

Matrix Family::exact_fisher(const Vector& /*theta*/) const {
  throw CapabilityError(name() + ": no exact Fisher matrix");
}

Support Family::support(const Vector& /*theta*/) const {
  throw CapabilityError(name() + ": not enumerable");
}

Matrix Family::sufficient_statistics(const Samples& /*points*/) const {
  throw CapabilityError(name() + ": no expectation parameters");
}

Vector Family::to_expectation(const Vector& /*theta*/) const {
  throw CapabilityError(name() + ": no expectation parameters");
}

Vector Family::from_expectation(const Vector& /*mean_statistics*/) const {
  throw CapabilityError(name() + ": no expectation parameters");
}

Vector Family::max_likelihood(const Samples& points, const Vector& weights) const {
  if (points.cols() != weights.size()) throw InvalidInput("one weight per point is required");
  if ((weights.array() < 0.0).any()) throw InvalidInput("maximum likelihood needs non-negative weights");
  const double total = weights.sum();
  if (!(total > 0.0)) throw DegenerateUpdate(name() + ": weights sum to zero");
  if ((weights.array() > 0.0).count() < min_ml_points())
    throw DegenerateUpdate(name() + ": too few weighted points for a maximum-likelihood estimate");
  const Matrix stats = sufficient_statistics(points);
  return from_expectation(stats * weights / total);
}

Vector Family::score(const Vector& theta, const Vector& point) const {
  Samples one(point.size(), 1);
  one.col(0) = point;
  return score(theta, one).col(0);
}

}  // namespace igo
