#pragma once

#include "igo/core/family.hpp"

namespace igo {

/// P_theta (x) U[0,1] on X x [0,1]. Points are the base point with the noise
/// seed omega appended as the last coordinate. omega for sample i is the first
/// uniform of the noise-tagged stream i, which is also the stream a noisy
/// objective reads, so both constructions see the same randomness.
class NoisyLiftFamily final : public Family {
 public:
  explicit NoisyLiftFamily(FamilyPtr base);

  std::string name() const override { return base_->name() + "+uniform"; }
  Index dim_theta() const override { return base_->dim_theta(); }
  Index dim_point() const override { return base_->dim_point() + 1; }
  Capabilities capabilities() const override;

  void validate(const Vector& theta) const override { base_->validate(theta); }
  Vector project(const Vector& theta) const override { return base_->project(theta); }
  Samples sample(const Vector& theta, Index count, const StreamFactory& streams) const override;
  Matrix score(const Vector& theta, const Samples& points) const override;
  Vector log_density(const Vector& theta, const Samples& points) const override;
  Matrix exact_fisher(const Vector& theta) const override { return base_->exact_fisher(theta); }

  const Family& base() const { return *base_; }

  using Family::score;

 private:
  FamilyPtr base_;
};

/// omega for sample `index` of the step described by `streams` (any tag).
double noise_seed(const StreamFactory& streams, Index index);

}  // namespace igo
