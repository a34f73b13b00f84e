#include "igo/objectives/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "igo/core/spec_string.hpp"
#include "igo/flow/normal.hpp"

namespace igo {

double Objective::operator()(const Vector& x, Rng* noise) const {
  if (x.size() != dim())
    throw InvalidInput(name() + ": expected a point of dimension " + std::to_string(dim()) + ", got " +
                       std::to_string(x.size()));
  if (noisy() && noise == nullptr) throw InvalidInput(name() + ": noisy objective needs a noise stream");
  return evaluate(x, noise);
}

namespace {

class Linear final : public Objective {
 public:
  Linear(Vector alpha, double c, std::string label)
      : alpha_(std::move(alpha)), c_(c), label_(std::move(label)) {}
  std::string name() const override { return label_; }
  Index dim() const override { return alpha_.size(); }

 protected:
  double evaluate(const Vector& x, Rng*) const override { return c_ - alpha_.dot(x); }

 private:
  Vector alpha_;
  double c_;
  std::string label_;
};

class Sphere final : public Objective {
 public:
  explicit Sphere(Vector center) : center_(std::move(center)) {}
  std::string name() const override { return "sphere"; }
  Index dim() const override { return center_.size(); }

 protected:
  double evaluate(const Vector& x, Rng*) const override { return (x - center_).squaredNorm(); }

 private:
  Vector center_;
};

class TwoMin final : public Objective {
 public:
  explicit TwoMin(Vector y) : y_(std::move(y)) {}
  std::string name() const override { return "two_min"; }
  Index dim() const override { return y_.size(); }
  const Vector& target() const { return y_; }

 protected:
  double evaluate(const Vector& x, Rng*) const override {
    const double direct = (x - y_).cwiseAbs().sum();
    const double flipped = ((1.0 - x.array()) - y_.array()).abs().sum();
    return std::min(direct, flipped);
  }

 private:
  Vector y_;
};

class Transformed final : public Objective {
 public:
  Transformed(ObjectivePtr base, Transform phi) : base_(std::move(base)), phi_(phi) {}
  std::string name() const override { return base_->name() + "+phi"; }
  Index dim() const override { return base_->dim(); }
  bool noisy() const override { return base_->noisy(); }

 protected:
  double evaluate(const Vector& x, Rng* noise) const override {
    return apply_transform(phi_, (*base_)(x, noise));
  }

 private:
  ObjectivePtr base_;
  Transform phi_;
};

class Noisy final : public Objective {
 public:
  Noisy(ObjectivePtr base, NoiseKind kind, double amplitude)
      : base_(std::move(base)), kind_(kind), amplitude_(amplitude) {}
  std::string name() const override { return base_->name() + "+noise"; }
  Index dim() const override { return base_->dim(); }
  bool noisy() const override { return true; }

 protected:
  double evaluate(const Vector& x, Rng* noise) const override {
    const double omega = uniform01(*noise);
    return (*base_)(x, noise) + amplitude_ * noise_shape(kind_, omega);
  }

 private:
  ObjectivePtr base_;
  NoiseKind kind_;
  double amplitude_;
};

class OmegaExplicit final : public Objective {
 public:
  OmegaExplicit(ObjectivePtr base, NoiseKind kind, double amplitude)
      : base_(std::move(base)), kind_(kind), amplitude_(amplitude) {}
  std::string name() const override { return base_->name() + "+omega"; }
  Index dim() const override { return base_->dim() + 1; }

 protected:
  double evaluate(const Vector& x, Rng*) const override {
    const Index d = base_->dim();
    return (*base_)(x.head(d)) + amplitude_ * noise_shape(kind_, x(d));
  }

 private:
  ObjectivePtr base_;
  NoiseKind kind_;
  double amplitude_;
};

Transform parse_transform(const std::string& name) {
  if (name == "cube") return Transform::cube;
  if (name == "scaled_shift") return Transform::scaled_shift;
  if (name == "signed_power") return Transform::signed_power;
  throw InvalidInput("unknown transform '" + name + "'");
}

NoiseKind parse_noise(const std::string& name) {
  if (name == "uniform") return NoiseKind::uniform;
  if (name == "gaussian") return NoiseKind::gaussian;
  throw InvalidInput("unknown noise kind '" + name + "'");
}

}  // namespace

ObjectivePtr make_onemax(Index d) {
  if (d < 1) throw InvalidInput("onemax: dimension must be positive");
  return std::make_shared<Linear>(Vector::Ones(d), static_cast<double>(d), "onemax");
}

ObjectivePtr make_linear(Vector alpha, double c) {
  if (alpha.size() < 1) throw InvalidInput("linear: empty coefficient vector");
  return std::make_shared<Linear>(std::move(alpha), c, "linear");
}

ObjectivePtr make_sphere(Vector center) {
  if (center.size() < 1) throw InvalidInput("sphere: empty center");
  return std::make_shared<Sphere>(std::move(center));
}

ObjectivePtr make_two_min(Vector y) {
  if (y.size() < 1) throw InvalidInput("two_min: empty target");
  for (Index i = 0; i < y.size(); ++i)
    if (y(i) != 0.0 && y(i) != 1.0) throw InvalidInput("two_min: target must be a bitstring");
  return std::make_shared<TwoMin>(std::move(y));
}

ObjectivePtr make_two_min(Index d, std::uint64_t seed) {
  if (d < 1) throw InvalidInput("two_min: dimension must be positive");
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(StreamTag::problem)));
  Vector y(d);
  for (Index i = 0; i < d; ++i) y(i) = uniform01(rng) < 0.5 ? 1.0 : 0.0;
  return make_two_min(std::move(y));
}

double apply_transform(Transform phi, double f) {
  switch (phi) {
    case Transform::cube:
      return f * f * f;
    case Transform::scaled_shift:
      return 2.0 * f + 7.0;
    case Transform::signed_power:
      return f == 0.0 ? 0.0 : std::copysign(std::cbrt(std::abs(f)), f);
  }
  return f;
}

ObjectivePtr monotone_transform(ObjectivePtr base, Transform phi) {
  return std::make_shared<Transformed>(std::move(base), phi);
}

double noise_shape(NoiseKind kind, double omega) {
  if (kind == NoiseKind::uniform) return omega - 0.5;
  const double tiny = 0x1.0p-54;
  return normal::quantile(std::clamp(omega, tiny, 1.0 - tiny));
}

ObjectivePtr make_noisy(ObjectivePtr base, NoiseKind kind, double amplitude) {
  return std::make_shared<Noisy>(std::move(base), kind, amplitude);
}

ObjectivePtr make_omega_explicit(ObjectivePtr base, NoiseKind kind, double amplitude) {
  return std::make_shared<OmegaExplicit>(std::move(base), kind, amplitude);
}

Index hamming(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InvalidInput("hamming: length mismatch");
  Index d = 0;
  for (Index i = 0; i < a.size(); ++i) d += (a(i) > 0.5) != (b(i) > 0.5);
  return d;
}

const Vector* two_min_target(const Objective& objective) {
  const auto* t = dynamic_cast<const TwoMin*>(&objective);
  return t ? &t->target() : nullptr;
}

ObjectivePtr parse_objective(const std::string& spec) {
  const SpecString s = SpecString::parse(spec);
  ObjectivePtr obj;
  if (s.kind == "onemax") {
    s.require_known({"d", "phi", "noise", "amplitude", "omega"});
    obj = make_onemax(s.integer("d"));
  } else if (s.kind == "linear") {
    s.require_known({"alpha", "c", "d", "phi", "noise", "amplitude", "omega"});
    Vector alpha = s.has("alpha") ? s.list("alpha") : Vector::Ones(s.integer("d"));
    obj = make_linear(std::move(alpha), s.real("c", 0.0));
  } else if (s.kind == "sphere") {
    s.require_known({"center", "d", "phi", "noise", "amplitude", "omega"});
    obj = make_sphere(s.has("center") ? s.list("center") : Vector::Zero(s.integer("d")));
  } else if (s.kind == "two_min") {
    s.require_known({"y", "d", "seed", "phi", "noise", "amplitude", "omega"});
    obj = s.has("y") ? make_two_min(s.list("y")) : make_two_min(s.integer("d"), s.seed("seed", 0));
  } else {
    throw InvalidInput("unknown objective kind '" + s.kind + "'");
  }
  if (s.has("phi")) obj = monotone_transform(obj, parse_transform(s.values.at("phi")));
  if (s.has("noise")) {
    const NoiseKind kind = parse_noise(s.values.at("noise"));
    const std::string omega = s.text("omega", "drawn");
    if (omega == "drawn") {
      obj = make_noisy(obj, kind, s.real("amplitude", 1.0));
    } else if (omega == "explicit") {
      obj = make_omega_explicit(obj, kind, s.real("amplitude", 1.0));
    } else {
      throw InvalidInput("omega must be drawn or explicit");
    }
  } else if (s.has("omega") || s.has("amplitude")) {
    throw InvalidInput("omega and amplitude need a noise kind");
  }
  return obj;
}

}  // namespace igo
