#pragma once

#include <cstdint>

#include "igo/core/family.hpp"

namespace igo {

/// Restricted Boltzmann machine with energy
/// E(x, h) = -a.x - b.h - x^T W h on x in {0,1}^nx, h in {0,1}^nh.
struct RbmParams {
  Vector a;
  Vector b;
  Matrix w;  // nx x nh

  Index nx() const { return a.size(); }
  Index nh() const { return b.size(); }
};

inline Index rbm_dim_theta(Index nx, Index nh) { return nx + nh + nx * nh; }

/// Flat layout: a, then b, then W row-major.
Vector pack_rbm(const RbmParams& params);
RbmParams unpack_rbm(const Vector& theta, Index nx, Index nh);

/// Largest layer size enumerated exactly.
inline constexpr Index kRbmEnumerationCutoff = 20;

double rbm_energy(const RbmParams& params, const Vector& x, const Vector& h);

/// P(h_j = 1 | x) = sigma(b_j + sum_i w_ij x_i).
Vector rbm_hidden_given_visible(const RbmParams& params, const Vector& x);
/// P(x_i = 1 | h) = sigma(a_i + sum_j w_ij h_j).
Vector rbm_visible_given_hidden(const RbmParams& params, const Vector& h);

/// ln Z by enumerating the smaller layer. CapabilityError when both layers
/// exceed the cutoff.
double rbm_log_partition(const RbmParams& params);

/// ln P(x, h) (joint) and ln P(x) (hidden units summed out).
double rbm_log_density(const RbmParams& params, const Vector& x, const Vector& h);
double rbm_log_marginal(const RbmParams& params, const Vector& x);

struct RbmSample {
  Vector x;
  Vector h;
};

/// Gibbs chain from a uniformly random visible state: `sweeps` full sweeps
/// (h | x then x | h), then a final h | x draw.
RbmSample rbm_gibbs_sample(const RbmParams& params, Index sweeps, Rng& rng);

/// Initialization with every unit active with probability close to 1/2:
/// w_ij ~ N(0, 1/(nx nh)), b_j = -sum_i w_ij / 2, a_i = -sum_j w_ij / 2 + N(0, 0.01/nx^2).
RbmParams rbm_init(Index nx, Index nh, Rng& rng);

/// Reparametrization equivalent to replacing h_j by 1 - h_j:
/// a_i += w_ij, b_j = -b_j, w_ij = -w_ij.
RbmParams rbm_flip_hidden(const RbmParams& params, Index j);

/// Same map on flat parameter vectors, as a matrix (it is linear).
Matrix rbm_flip_hidden_matrix(Index nx, Index nh, Index j);

/// theta_standard = L theta_centered for the centered energy
/// -sum A_i (x_i - 1/2) - sum B_j (h_j - 1/2) - sum W_ij (x_i - 1/2)(h_j - 1/2).
Matrix rbm_centered_map(Index nx, Index nh);

/// T(x, h) = (x, h, x h^T row-major).
Vector rbm_joint_statistics(const Vector& x, const Vector& h);

struct RbmMoments {
  Vector mean;
  Matrix cov;
  double log_partition = 0.0;
};

/// E[T] and Cov(T) under the joint distribution, by hidden-layer enumeration.
RbmMoments rbm_joint_moments(const RbmParams& params, bool with_covariance = true);

enum class RbmSampler { exact, gibbs };

struct RbmOptions {
  RbmSampler sampler = RbmSampler::exact;
  Index burn_in = 100;
  /// Monte-Carlo size for E[T] when the hidden layer is too large to enumerate.
  Index expectation_samples = 10000;
  std::uint64_t expectation_seed = 0x5eedULL;
};

/// RBM on the joint space (x, h); points are the concatenation (x, h).
/// An exponential family with statistics T, so score = T - E[T] and Fisher = Cov(T).
class RbmJointFamily final : public Family {
 public:
  RbmJointFamily(Index nx, Index nh, RbmOptions options = {});

  std::string name() const override { return "rbm"; }
  Index dim_theta() const override { return rbm_dim_theta(nx_, nh_); }
  Index dim_point() const override { return nx_ + nh_; }
  Capabilities capabilities() const override;

  void validate(const Vector& theta) const override;
  Samples sample(const Vector& theta, Index count, const StreamFactory& streams) const override;
  Matrix score(const Vector& theta, const Samples& points) const override;
  Vector log_density(const Vector& theta, const Samples& points) const override;
  Matrix exact_fisher(const Vector& theta) const override;
  Support support(const Vector& theta) const override;
  Matrix sufficient_statistics(const Samples& points) const override;
  Vector to_expectation(const Vector& theta) const override;

  Index nx() const { return nx_; }
  Index nh() const { return nh_; }
  const RbmOptions& options() const { return options_; }

  /// E[T] exactly when nh is enumerable, otherwise a seeded Gibbs estimate.
  Vector model_expectation(const Vector& theta) const;

  using Family::score;

 private:
  Index nx_;
  Index nh_;
  RbmOptions options_;
};

/// RBM marginal on x (hidden units summed out): score U(x) - E[T] with
/// U(x) = E[T(x, h) | x], Fisher = Cov(U).
class RbmMarginalFamily final : public Family {
 public:
  RbmMarginalFamily(Index nx, Index nh, RbmOptions options = {});

  std::string name() const override { return "rbm_marginal"; }
  Index dim_theta() const override { return rbm_dim_theta(nx_, nh_); }
  Index dim_point() const override { return nx_; }
  Capabilities capabilities() const override;

  void validate(const Vector& theta) const override;
  Samples sample(const Vector& theta, Index count, const StreamFactory& streams) const override;
  Matrix score(const Vector& theta, const Samples& points) const override;
  Vector log_density(const Vector& theta, const Samples& points) const override;
  Matrix exact_fisher(const Vector& theta) const override;
  Support support(const Vector& theta) const override;

  using Family::score;

 private:
  Index nx_;
  Index nh_;
  RbmJointFamily joint_;
};

}  // namespace igo
