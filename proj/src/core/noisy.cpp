#include "igo/core/noisy.hpp"

#include <limits>
#include <utility>

namespace igo {

NoisyLiftFamily::NoisyLiftFamily(FamilyPtr base) : base_(std::move(base)) {
  if (!base_) throw InvalidInput("noisy lift needs a base family");
}

Capabilities NoisyLiftFamily::capabilities() const {
  Capabilities c = base_->capabilities();
  c.enumerable = false;
  c.expectation_params = false;
  return c;
}

double noise_seed(const StreamFactory& streams, Index index) {
  Rng rng = streams.with_tag(StreamTag::noise).stream(static_cast<std::uint64_t>(index));
  return uniform01(rng);
}

Samples NoisyLiftFamily::sample(const Vector& theta, Index count, const StreamFactory& streams) const {
  const Index d = base_->dim_point();
  Samples out(d + 1, count);
  out.topRows(d) = base_->sample(theta, count, streams);
  for (Index n = 0; n < count; ++n) out(d, n) = noise_seed(streams, n);
  return out;
}

Matrix NoisyLiftFamily::score(const Vector& theta, const Samples& points) const {
  if (points.rows() != dim_point()) throw InvalidInput(name() + ": sample dimension mismatch");
  return base_->score(theta, Samples(points.topRows(base_->dim_point())));
}

Vector NoisyLiftFamily::log_density(const Vector& theta, const Samples& points) const {
  if (points.rows() != dim_point()) throw InvalidInput(name() + ": sample dimension mismatch");
  Vector out = base_->log_density(theta, Samples(points.topRows(base_->dim_point())));
  const Index last = points.rows() - 1;
  for (Index n = 0; n < points.cols(); ++n)
    if (points(last, n) < 0.0 || points(last, n) > 1.0) out(n) = -std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace igo
