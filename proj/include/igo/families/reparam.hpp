#pragma once

#include "igo/core/family.hpp"

namespace igo {

/// The base family viewed through the affine chart theta = L phi + c.
///
/// Scores transform as L^T g and the Fisher matrix as L^T I L, so natural
/// gradient steps in phi map to natural gradient steps in theta.
class AffineReparamFamily final : public Family {
 public:
  AffineReparamFamily(FamilyPtr base, Matrix linear, Vector offset, std::string label = "affine");

  std::string name() const override { return label_; }
  Index dim_theta() const override { return linear_.cols(); }
  Index dim_point() const override { return base_->dim_point(); }
  Capabilities capabilities() const override;

  void validate(const Vector& phi) const override;
  Samples sample(const Vector& phi, Index count, const StreamFactory& streams) const override;
  Matrix score(const Vector& phi, const Samples& points) const override;
  Vector log_density(const Vector& phi, const Samples& points) const override;
  Matrix exact_fisher(const Vector& phi) const override;
  Support support(const Vector& phi) const override;

  /// theta = L phi + c.
  Vector to_base(const Vector& phi) const;
  /// Least-squares inverse of to_base (exact when L is invertible).
  Vector from_base(const Vector& theta) const;

  const Family& base() const { return *base_; }

  using Family::score;

 private:
  FamilyPtr base_;
  Matrix linear_;
  Vector offset_;
  std::string label_;
};

}  // namespace igo
