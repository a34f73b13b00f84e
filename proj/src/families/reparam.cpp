#include "igo/families/reparam.hpp"

#include <utility>

namespace igo {

AffineReparamFamily::AffineReparamFamily(FamilyPtr base, Matrix linear, Vector offset,
                                         std::string label)
    : base_(std::move(base)), linear_(std::move(linear)), offset_(std::move(offset)),
      label_(std::move(label)) {
  if (!base_) throw InvalidInput("reparametrization needs a base family");
  if (linear_.rows() != base_->dim_theta() || offset_.size() != base_->dim_theta())
    throw InvalidInput("reparametrization: chart does not match the base parameter dimension");
}

Capabilities AffineReparamFamily::capabilities() const {
  Capabilities c = base_->capabilities();
  c.expectation_params = false;
  return c;
}

Vector AffineReparamFamily::to_base(const Vector& phi) const {
  if (phi.size() != dim_theta()) throw InvalidInput(label_ + ": wrong parameter length");
  return linear_ * phi + offset_;
}

Vector AffineReparamFamily::from_base(const Vector& theta) const {
  return linear_.colPivHouseholderQr().solve(theta - offset_);
}

void AffineReparamFamily::validate(const Vector& phi) const { base_->validate(to_base(phi)); }

Samples AffineReparamFamily::sample(const Vector& phi, Index count,
                                    const StreamFactory& streams) const {
  return base_->sample(to_base(phi), count, streams);
}

Matrix AffineReparamFamily::score(const Vector& phi, const Samples& points) const {
  return linear_.transpose() * base_->score(to_base(phi), points);
}

Vector AffineReparamFamily::log_density(const Vector& phi, const Samples& points) const {
  return base_->log_density(to_base(phi), points);
}

Matrix AffineReparamFamily::exact_fisher(const Vector& phi) const {
  return linear_.transpose() * base_->exact_fisher(to_base(phi)) * linear_;
}

Support AffineReparamFamily::support(const Vector& phi) const { return base_->support(to_base(phi)); }

}  // namespace igo
