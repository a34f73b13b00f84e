#include "igo/core/steps.hpp"

#include <cmath>
#include <iostream>
#include <string>

namespace igo {

namespace {

void check_batch(const Family& family, const Samples& points, const RankedWeights& weights) {
  if (points.rows() != family.dim_point())
    throw InvalidInput(family.name() + ": sample dimension mismatch");
  if (points.cols() != weights.size()) throw InvalidInput("one weight per sample is required");
}

bool all_zero(const Vector& w) { return (w.array() == 0.0).all(); }

}  // namespace

Vector weighted_score(const Family& family, const Vector& theta, const Samples& points,
                      const Vector& weights) {
  return family.score(theta, points) * weights;
}

Vector igo_step(const Family& family, const Vector& theta, const Samples& points,
                const RankedWeights& weights, double dt, const FisherMatrix& fisher,
                std::optional<double> ridge) {
  check_batch(family, points, weights);
  if (all_zero(weights.weights)) return theta;
  const Vector g = weighted_score(family, theta, points, weights.weights);
  return theta + dt * natural_direction(fisher, g, ridge);
}

Vector igo_step(const Family& family, const Vector& theta, const Samples& points,
                const RankedWeights& weights, double dt) {
  if (all_zero(weights.weights)) return theta;
  return igo_step(family, theta, points, weights, dt, exact_fisher(family, theta));
}

Vector vanilla_step(const Family& family, const Vector& theta, const Samples& points,
                    const RankedWeights& weights, double dt) {
  check_batch(family, points, weights);
  if (all_zero(weights.weights)) return theta;
  return theta + dt * weighted_score(family, theta, points, weights.weights);
}

Vector igo_ml_step(const Family& family, const Vector& theta, const Samples& points,
                   const RankedWeights& weights, double dt, WeightSumPolicy policy) {
  check_batch(family, points, weights);
  if (!(dt > 0.0 && dt <= 1.0)) throw InvalidInput("igo_ml_step: dt must lie in (0, 1]");
  Vector w = weights.weights;
  double total = w.sum();
  if (policy != WeightSumPolicy::general && std::abs(total - 1.0) > 1e-12) {
    if (policy == WeightSumPolicy::strict)
      throw InvalidInput("igo_ml_step: weights sum to " + std::to_string(total) + ", expected 1");
    if (!(total > 0.0)) throw DegenerateUpdate("igo_ml_step: weights sum to zero");
    std::clog << "igo_ml_step: renormalizing weights that sum to " << total << '\n';
    w /= total;
    total = 1.0;
  }
  const Vector current = family.to_expectation(theta);
  const Vector target = family.sufficient_statistics(points) * w;
  return family.from_expectation((1.0 - dt * total) * current + dt * target);
}

Index elite_count(double q, Index n) {
  if (!(q > 0.0 && q <= 1.0)) throw InvalidInput("elite fraction must lie in (0, 1]");
  // Guard against q N landing a rounding error above an integer.
  const double raw = q * static_cast<double>(n);
  const Index count = static_cast<Index>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::max<Index>(1, std::min(count, n));
}

Vector cem_step(const Family& family, const Samples& points, std::span<const double> values, double q) {
  const Index n = points.cols();
  if (static_cast<Index>(values.size()) != n) throw InvalidInput("one value per sample is required");
  if (n == 0) throw InvalidInput("cem_step: empty sample");
  const Index elites = elite_count(q, n);
  const std::vector<Index> order = rank_order(values);
  Vector w = Vector::Zero(n);
  for (Index k = 0; k < elites; ++k) w(order[static_cast<std::size_t>(k)]) = 1.0 / static_cast<double>(elites);
  return family.max_likelihood(points, w);
}

Vector smoothed_cem_step(const Family& family, const Vector& theta, const Samples& points,
                         const RankedWeights& weights, double alpha, Coordinates coordinates) {
  check_batch(family, points, weights);
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("smoothed CEM: alpha must lie in (0, 1]");
  const Vector ml = family.max_likelihood(points, weights.weights);
  if (coordinates == Coordinates::native) return (1.0 - alpha) * theta + alpha * ml;
  return family.from_expectation((1.0 - alpha) * family.to_expectation(theta) +
                                 alpha * family.to_expectation(ml));
}

}  // namespace igo
