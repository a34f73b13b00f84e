#include "igo/families/bernoulli.hpp"

#include <cmath>
#include <string>

namespace igo {

namespace {

void check_points(const Samples& points, Index d) {
  if (points.rows() != d)
    throw InvalidInput("expected points of dimension " + std::to_string(d) + ", got " +
                       std::to_string(points.rows()));
}

Support enumerate_product(const Vector& p) {
  const Index d = p.size();
  if (d > kEnumerationCutoff) throw CapabilityError("bitstring support too large to enumerate");
  Support s;
  s.points = enumerate_bitstrings(d);
  s.probabilities.resize(s.points.cols());
  for (Index k = 0; k < s.points.cols(); ++k) {
    double prob = 1.0;
    for (Index i = 0; i < d; ++i) prob *= s.points(i, k) > 0.5 ? p(i) : 1.0 - p(i);
    s.probabilities(k) = prob;
  }
  s.exact = true;
  return s;
}

Samples sample_product(const Vector& p, Index count, const StreamFactory& streams) {
  Samples x(p.size(), count);
  for (Index n = 0; n < count; ++n) {
    Rng rng = streams.stream(static_cast<std::uint64_t>(n));
    for (Index i = 0; i < p.size(); ++i) x(i, n) = uniform01(rng) < p(i) ? 1.0 : 0.0;
  }
  return x;
}

}  // namespace

Samples enumerate_bitstrings(Index d) {
  const Index count = Index{1} << d;
  Samples x(d, count);
  for (Index k = 0; k < count; ++k)
    for (Index i = 0; i < d; ++i) x(i, k) = static_cast<double>((k >> i) & 1);
  return x;
}

Vector logistic(const Vector& logits) {
  return logits.unaryExpr([](double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
  });
}

Vector logit(const Vector& probabilities) {
  return probabilities.unaryExpr([](double p) { return std::log(p) - std::log1p(-p); });
}

// ---------------------------------------------------------------------------

BernoulliFamily::BernoulliFamily(Index d, double clamp_epsilon) : d_(d), eps_(clamp_epsilon) {
  if (d < 1) throw InvalidInput("bernoulli: dimension must be positive");
  if (!(clamp_epsilon >= 0.0 && clamp_epsilon < 0.5))
    throw InvalidInput("bernoulli: clamp epsilon must lie in [0, 1/2)");
}

Capabilities BernoulliFamily::capabilities() const {
  return {.exact_fisher = true,
          .expectation_params = true,
          .latent = false,
          .enumerable = d_ <= kEnumerationCutoff};
}

void BernoulliFamily::validate(const Vector& theta) const {
  if (theta.size() != d_) throw InvalidInput("bernoulli: wrong parameter dimension");
  for (Index i = 0; i < d_; ++i)
    if (!(theta(i) > 0.0 && theta(i) < 1.0))
      throw DomainError("bernoulli: theta_" + std::to_string(i) + " = " +
                        std::to_string(theta(i)) + " is not in (0, 1)");
}

Vector BernoulliFamily::project(const Vector& theta) const {
  return theta.cwiseMax(eps_).cwiseMin(1.0 - eps_);
}

Samples BernoulliFamily::sample(const Vector& theta, Index count,
                                const StreamFactory& streams) const {
  if (theta.size() != d_) throw InvalidInput("bernoulli: wrong parameter dimension");
  return sample_product(theta, count, streams);
}

Matrix BernoulliFamily::score(const Vector& theta, const Samples& points) const {
  validate(theta);
  check_points(points, d_);
  Matrix g(d_, points.cols());
  for (Index n = 0; n < points.cols(); ++n)
    for (Index i = 0; i < d_; ++i)
      g(i, n) = points(i, n) / theta(i) - (1.0 - points(i, n)) / (1.0 - theta(i));
  return g;
}

Vector BernoulliFamily::log_density(const Vector& theta, const Samples& points) const {
  check_points(points, d_);
  Vector out(points.cols());
  for (Index n = 0; n < points.cols(); ++n) {
    double s = 0.0;
    for (Index i = 0; i < d_; ++i)
      s += points(i, n) > 0.5 ? std::log(theta(i)) : std::log1p(-theta(i));
    out(n) = s;
  }
  return out;
}

Matrix BernoulliFamily::exact_fisher(const Vector& theta) const {
  validate(theta);
  return (theta.array() * (1.0 - theta.array())).inverse().matrix().asDiagonal();
}

Support BernoulliFamily::support(const Vector& theta) const {
  if (theta.size() != d_) throw InvalidInput("bernoulli: wrong parameter dimension");
  return enumerate_product(theta);
}

Vector BernoulliFamily::from_expectation(const Vector& mean_statistics) const {
  if (mean_statistics.size() != d_) throw InvalidInput("bernoulli: wrong statistics dimension");
  const double slack = 1e-12;
  for (Index i = 0; i < d_; ++i)
    if (!(mean_statistics(i) >= -slack && mean_statistics(i) <= 1.0 + slack))
      throw DegenerateUpdate("bernoulli: expectation parameter outside [0, 1]");
  return mean_statistics.cwiseMax(0.0).cwiseMin(1.0);
}

// ---------------------------------------------------------------------------

BernoulliLogitFamily::BernoulliLogitFamily(Index d) : d_(d) {
  if (d < 1) throw InvalidInput("bernoulli_logit: dimension must be positive");
}

Capabilities BernoulliLogitFamily::capabilities() const {
  return {.exact_fisher = true,
          .expectation_params = true,
          .latent = false,
          .enumerable = d_ <= kEnumerationCutoff};
}

void BernoulliLogitFamily::validate(const Vector& theta) const {
  if (theta.size() != d_) throw InvalidInput("bernoulli_logit: wrong parameter dimension");
  if (!theta.allFinite()) throw DomainError("bernoulli_logit: non-finite logit");
}

Samples BernoulliLogitFamily::sample(const Vector& theta, Index count,
                                     const StreamFactory& streams) const {
  validate(theta);
  return sample_product(logistic(theta), count, streams);
}

Matrix BernoulliLogitFamily::score(const Vector& theta, const Samples& points) const {
  validate(theta);
  check_points(points, d_);
  return points.colwise() - logistic(theta);
}

Vector BernoulliLogitFamily::log_density(const Vector& theta, const Samples& points) const {
  check_points(points, d_);
  // ln sigma(t) = -log1p(exp(-t)), computed stably for both signs.
  auto log_sigmoid = [](double t) {
    return t >= 0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
  };
  Vector out(points.cols());
  for (Index n = 0; n < points.cols(); ++n) {
    double s = 0.0;
    for (Index i = 0; i < d_; ++i)
      s += points(i, n) > 0.5 ? log_sigmoid(theta(i)) : log_sigmoid(-theta(i));
    out(n) = s;
  }
  return out;
}

Matrix BernoulliLogitFamily::exact_fisher(const Vector& theta) const {
  validate(theta);
  const Vector p = logistic(theta);
  return (p.array() * (1.0 - p.array())).matrix().asDiagonal();
}

Support BernoulliLogitFamily::support(const Vector& theta) const {
  validate(theta);
  return enumerate_product(logistic(theta));
}

Vector BernoulliLogitFamily::to_expectation(const Vector& theta) const {
  validate(theta);
  return logistic(theta);
}

Vector BernoulliLogitFamily::from_expectation(const Vector& mean_statistics) const {
  if (mean_statistics.size() != d_) throw InvalidInput("bernoulli_logit: wrong statistics dimension");
  for (Index i = 0; i < d_; ++i)
    if (!(mean_statistics(i) > 0.0 && mean_statistics(i) < 1.0))
      throw DegenerateUpdate("bernoulli_logit: expectation parameter outside (0, 1)");
  return logit(mean_statistics);
}

// ---------------------------------------------------------------------------

Vector bernoulli_igo_update(const Vector& theta, const Samples& ranked,
                            std::span<const double> rank_weights, double dt,
                            double clamp_epsilon) {
  if (ranked.rows() != theta.size()) throw InvalidInput("bernoulli update: dimension mismatch");
  const Index used = std::min<Index>(ranked.cols(), static_cast<Index>(rank_weights.size()));
  double wbar = 0.0;
  Vector acc = Vector::Zero(theta.size());
  for (Index j = 0; j < used; ++j) {
    const double w = rank_weights[static_cast<std::size_t>(j)];
    wbar += w;
    acc += w * ranked.col(j);
  }
  Vector next = (1.0 - wbar * dt) * theta + dt * acc;
  return next.cwiseMax(clamp_epsilon).cwiseMin(1.0 - clamp_epsilon);
}

}  // namespace igo
