#pragma once

#include <memory>
#include <string>

#include "igo/core/random.hpp"
#include "igo/core/types.hpp"

namespace igo {

/// An objective to be minimized on bitstrings (0/1 vectors) or real vectors.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  virtual Index dim() const = 0;
  virtual bool noisy() const { return false; }

  /// f(x). Noisy objectives draw their noise from `noise`, which must be set.
  double operator()(const Vector& x, Rng* noise = nullptr) const;

 protected:
  virtual double evaluate(const Vector& x, Rng* noise) const = 0;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

/// d - sum x_i.
ObjectivePtr make_onemax(Index d);
/// c - sum alpha_i x_i.
ObjectivePtr make_linear(Vector alpha, double c);
/// |x - center|^2.
ObjectivePtr make_sphere(Vector center);
/// min(|x - y|_1, |(1 - x) - y|_1): optima at y and its complement.
ObjectivePtr make_two_min(Vector y);
/// two_min with y drawn uniformly from `seed`.
ObjectivePtr make_two_min(Index d, std::uint64_t seed);

enum class Transform { cube, scaled_shift, signed_power };

/// cube: f^3; scaled_shift: 2 f + 7; signed_power: f |f|^(-2/3) (0 at 0).
double apply_transform(Transform phi, double f);
ObjectivePtr monotone_transform(ObjectivePtr base, Transform phi);

enum class NoiseKind { uniform, gaussian };

/// g(omega) for omega in [0, 1): omega - 1/2 (uniform) or Phi^-1(omega) (gaussian).
double noise_shape(NoiseKind kind, double omega);

/// f(x) + amplitude g(omega), omega = uniform01(noise) drawn per evaluation.
ObjectivePtr make_noisy(ObjectivePtr base, NoiseKind kind, double amplitude);

/// Deterministic f~(x, omega) on X x [0, 1]: the last coordinate is omega.
ObjectivePtr make_omega_explicit(ObjectivePtr base, NoiseKind kind, double amplitude);

/// Hamming distance between two 0/1 vectors.
Index hamming(const Vector& a, const Vector& b);

/// Bitstring optima of a two_min objective (y), or nullptr for other kinds.
const Vector* two_min_target(const Objective& objective);

/// Parses `kind:key=value;key=value`, e.g. `onemax:d=10`, `two_min:d=16;seed=7`,
/// `two_min:y=1,0,1`, `linear:alpha=1,1,1;c=3`, `sphere:center=0,0` or
/// `sphere:d=2`. Optional keys on any kind: `phi=cube|scaled_shift|signed_power`,
/// `noise=uniform|gaussian` with `amplitude=` and `omega=drawn|explicit`
/// (explicit: omega is the point's last coordinate, for lifted families).
ObjectivePtr parse_objective(const std::string& spec);

}  // namespace igo
