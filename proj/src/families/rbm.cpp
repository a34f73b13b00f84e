#include "igo/families/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "igo/families/bernoulli.hpp"

namespace igo {

namespace {

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log_sum_exp(const Vector& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

Vector bits_of(Index k, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = static_cast<double>((k >> i) & 1);
  return v;
}

double unnormalized_log_marginal(const RbmParams& p, const Vector& x) {
  const Vector field = p.b + p.w.transpose() * x;
  double s = p.a.dot(x);
  for (Index j = 0; j < field.size(); ++j) s += softplus(field(j));
  return s;
}

RbmParams swapped(const RbmParams& p) { return {p.b, p.a, p.w.transpose()}; }

/// Unnormalized log P(h) with x summed out, for every hidden configuration.
Vector hidden_log_weights(const RbmParams& p) {
  const Index nh = p.nh();
  if (nh > kRbmEnumerationCutoff) throw CapabilityError("rbm: hidden layer too large to enumerate");
  const Index count = Index{1} << nh;
  Vector lw(count);
  for (Index k = 0; k < count; ++k) {
    const Vector h = bits_of(k, nh);
    const Vector field = p.a + p.w * h;
    double s = p.b.dot(h);
    for (Index i = 0; i < field.size(); ++i) s += softplus(field(i));
    lw(k) = s;
  }
  return lw;
}

Vector sample_bits(const Vector& probs, Rng& rng) {
  Vector v(probs.size());
  for (Index i = 0; i < probs.size(); ++i) v(i) = uniform01(rng) < probs(i) ? 1.0 : 0.0;
  return v;
}

/// E[T], Cov(T) by enumerating the hidden layer; x given h is a product of Bernoullis.
RbmMoments moments_over_hidden(const RbmParams& p, bool with_cov) {
  const Index nx = p.nx(), nh = p.nh();
  const Index dim = rbm_dim_theta(nx, nh);
  const Vector lw = hidden_log_weights(p);
  const double log_z = log_sum_exp(lw);
  RbmMoments out;
  out.log_partition = log_z;
  out.mean = Vector::Zero(dim);
  Matrix second = Matrix::Zero(with_cov ? dim : 0, with_cov ? dim : 0);
  std::vector<Index> support;
  for (Index k = 0; k < lw.size(); ++k) {
    const double pi = std::exp(lw(k) - log_z);
    if (pi == 0.0) continue;
    const Vector h = bits_of(k, nh);
    const Vector px = rbm_visible_given_hidden(p, h);
    const Vector mu = rbm_joint_statistics(px, h);
    out.mean += pi * mu;
    if (!with_cov) continue;
    second.noalias() += pi * mu * mu.transpose();
    // Conditional covariance: x_i enters T at i and at (i, j) for every active h_j.
    for (Index i = 0; i < nx; ++i) {
      const double v = pi * px(i) * (1.0 - px(i));
      support.clear();
      support.push_back(i);
      for (Index j = 0; j < nh; ++j)
        if (h(j) > 0.5) support.push_back(nx + nh + i * nh + j);
      for (Index r : support)
        for (Index c : support) second(r, c) += v;
    }
  }
  if (with_cov) {
    out.cov = second - out.mean * out.mean.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose());
  }
  return out;
}

/// Index of each swapped-model statistic in the original layout.
std::vector<Index> swapped_positions(Index nx, Index nh) {
  std::vector<Index> pos(static_cast<std::size_t>(rbm_dim_theta(nx, nh)));
  // Swapped model: visible = h (nh), hidden = x (nx), weights h_j x_i at nh + nx + j * nx + i.
  for (Index j = 0; j < nh; ++j) pos[static_cast<std::size_t>(j)] = nx + j;
  for (Index i = 0; i < nx; ++i) pos[static_cast<std::size_t>(nh + i)] = i;
  for (Index j = 0; j < nh; ++j)
    for (Index i = 0; i < nx; ++i)
      pos[static_cast<std::size_t>(nh + nx + j * nx + i)] = nx + nh + i * nh + j;
  return pos;
}

void check_points(const Samples& points, Index d, const char* who) {
  if (points.rows() != d)
    throw InvalidInput(std::string(who) + ": expected points of dimension " + std::to_string(d));
}

}  // namespace

Vector pack_rbm(const RbmParams& params) {
  const Index nx = params.nx(), nh = params.nh();
  Vector theta(rbm_dim_theta(nx, nh));
  theta.head(nx) = params.a;
  theta.segment(nx, nh) = params.b;
  Index k = nx + nh;
  for (Index i = 0; i < nx; ++i)
    for (Index j = 0; j < nh; ++j) theta(k++) = params.w(i, j);
  return theta;
}

RbmParams unpack_rbm(const Vector& theta, Index nx, Index nh) {
  if (theta.size() != rbm_dim_theta(nx, nh)) throw InvalidInput("rbm: wrong parameter length");
  RbmParams p{theta.head(nx), theta.segment(nx, nh), Matrix(nx, nh)};
  Index k = nx + nh;
  for (Index i = 0; i < nx; ++i)
    for (Index j = 0; j < nh; ++j) p.w(i, j) = theta(k++);
  return p;
}

double rbm_energy(const RbmParams& params, const Vector& x, const Vector& h) {
  return -params.a.dot(x) - params.b.dot(h) - x.dot(params.w * h);
}

Vector rbm_hidden_given_visible(const RbmParams& params, const Vector& x) {
  return (params.b + params.w.transpose() * x).unaryExpr(&sigmoid);
}

Vector rbm_visible_given_hidden(const RbmParams& params, const Vector& h) {
  return (params.a + params.w * h).unaryExpr(&sigmoid);
}

double rbm_log_partition(const RbmParams& params) {
  if (params.nh() <= params.nx() && params.nh() <= kRbmEnumerationCutoff)
    return log_sum_exp(hidden_log_weights(params));
  if (params.nx() <= kRbmEnumerationCutoff) return log_sum_exp(hidden_log_weights(swapped(params)));
  if (params.nh() <= kRbmEnumerationCutoff) return log_sum_exp(hidden_log_weights(params));
  throw CapabilityError("rbm: both layers too large to compute the partition function");
}

double rbm_log_density(const RbmParams& params, const Vector& x, const Vector& h) {
  return -rbm_energy(params, x, h) - rbm_log_partition(params);
}

double rbm_log_marginal(const RbmParams& params, const Vector& x) {
  return unnormalized_log_marginal(params, x) - rbm_log_partition(params);
}

RbmSample rbm_gibbs_sample(const RbmParams& params, Index sweeps, Rng& rng) {
  Vector x = sample_bits(Vector::Constant(params.nx(), 0.5), rng);
  for (Index s = 0; s < sweeps; ++s) {
    const Vector h = sample_bits(rbm_hidden_given_visible(params, x), rng);
    x = sample_bits(rbm_visible_given_hidden(params, h), rng);
  }
  return {x, sample_bits(rbm_hidden_given_visible(params, x), rng)};
}

RbmParams rbm_init(Index nx, Index nh, Rng& rng) {
  if (nx < 1 || nh < 1) throw InvalidInput("rbm: layer sizes must be positive");
  RbmParams p{Vector(nx), Vector(nh), Matrix(nx, nh)};
  const double sd = 1.0 / std::sqrt(static_cast<double>(nx * nh));
  for (Index i = 0; i < nx; ++i)
    for (Index j = 0; j < nh; ++j) p.w(i, j) = sd * standard_normal(rng);
  p.b = -0.5 * p.w.colwise().sum().transpose();
  const double noise_sd = 0.1 / static_cast<double>(nx);
  for (Index i = 0; i < nx; ++i) p.a(i) = -0.5 * p.w.row(i).sum() + noise_sd * standard_normal(rng);
  return p;
}

RbmParams rbm_flip_hidden(const RbmParams& params, Index j) {
  if (j < 0 || j >= params.nh()) throw InvalidInput("rbm flip: hidden index out of range");
  RbmParams p = params;
  p.a += params.w.col(j);
  p.b(j) = -params.b(j);
  p.w.col(j) = -params.w.col(j);
  return p;
}

Matrix rbm_flip_hidden_matrix(Index nx, Index nh, Index j) {
  const Index dim = rbm_dim_theta(nx, nh);
  Matrix m(dim, dim);
  for (Index c = 0; c < dim; ++c) {
    Vector e = Vector::Unit(dim, c);
    m.col(c) = pack_rbm(rbm_flip_hidden(unpack_rbm(e, nx, nh), j));
  }
  return m;
}

Matrix rbm_centered_map(Index nx, Index nh) {
  const Index dim = rbm_dim_theta(nx, nh);
  Matrix m = Matrix::Identity(dim, dim);
  // a_i = A_i - sum_j W_ij / 2,  b_j = B_j - sum_i W_ij / 2.
  for (Index i = 0; i < nx; ++i)
    for (Index j = 0; j < nh; ++j) {
      const Index wij = nx + nh + i * nh + j;
      m(i, wij) = -0.5;
      m(nx + j, wij) = -0.5;
    }
  return m;
}

Vector rbm_joint_statistics(const Vector& x, const Vector& h) {
  const Index nx = x.size(), nh = h.size();
  Vector t(rbm_dim_theta(nx, nh));
  t.head(nx) = x;
  t.segment(nx, nh) = h;
  Index k = nx + nh;
  for (Index i = 0; i < nx; ++i)
    for (Index j = 0; j < nh; ++j) t(k++) = x(i) * h(j);
  return t;
}

RbmMoments rbm_joint_moments(const RbmParams& params, bool with_covariance) {
  const Index nx = params.nx(), nh = params.nh();
  if (nh <= nx || nx > kRbmEnumerationCutoff) return moments_over_hidden(params, with_covariance);
  const RbmMoments s = moments_over_hidden(swapped(params), with_covariance);
  const std::vector<Index> pos = swapped_positions(nx, nh);
  const Index dim = rbm_dim_theta(nx, nh);
  RbmMoments out;
  out.log_partition = s.log_partition;
  out.mean.resize(dim);
  for (Index k = 0; k < dim; ++k) out.mean(pos[static_cast<std::size_t>(k)]) = s.mean(k);
  if (with_covariance) {
    out.cov.resize(dim, dim);
    for (Index r = 0; r < dim; ++r)
      for (Index c = 0; c < dim; ++c)
        out.cov(pos[static_cast<std::size_t>(r)], pos[static_cast<std::size_t>(c)]) = s.cov(r, c);
  }
  return out;
}

// ---------------------------------------------------------------------------

RbmJointFamily::RbmJointFamily(Index nx, Index nh, RbmOptions options)
    : nx_(nx), nh_(nh), options_(options) {
  if (nx < 1 || nh < 1) throw InvalidInput("rbm: layer sizes must be positive");
}

Capabilities RbmJointFamily::capabilities() const {
  const bool small_layer = std::min(nx_, nh_) <= kRbmEnumerationCutoff;
  return {.exact_fisher = small_layer,
          .expectation_params = false,
          .latent = false,
          .enumerable = nx_ + nh_ <= kEnumerationCutoff};
}

void RbmJointFamily::validate(const Vector& theta) const {
  if (theta.size() != dim_theta()) throw InvalidInput("rbm: wrong parameter length");
  if (!theta.allFinite()) throw DomainError("rbm: non-finite parameter");
}

Samples RbmJointFamily::sample(const Vector& theta, Index count,
                               const StreamFactory& streams) const {
  validate(theta);
  const RbmParams p = unpack_rbm(theta, nx_, nh_);
  Samples out(nx_ + nh_, count);
  if (options_.sampler == RbmSampler::exact && nh_ <= kRbmEnumerationCutoff) {
    const Vector lw = hidden_log_weights(p);
    const Vector prob = (lw.array() - log_sum_exp(lw)).exp().matrix();
    std::vector<double> cdf(static_cast<std::size_t>(prob.size()));
    double acc = 0.0;
    for (Index k = 0; k < prob.size(); ++k) cdf[static_cast<std::size_t>(k)] = (acc += prob(k));
    // Conditional visible probabilities, one table entry per hidden configuration.
    std::vector<Vector> px(static_cast<std::size_t>(prob.size()));
    for (Index n = 0; n < count; ++n) {
      Rng rng = streams.stream(static_cast<std::uint64_t>(n));
      const double u = uniform01(rng) * acc;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const Index k = std::min<Index>(static_cast<Index>(it - cdf.begin()), prob.size() - 1);
      const Vector h = bits_of(k, nh_);
      Vector& table = px[static_cast<std::size_t>(k)];
      if (table.size() == 0) table = rbm_visible_given_hidden(p, h);
      out.col(n) << sample_bits(table, rng), h;
    }
    return out;
  }
  for (Index n = 0; n < count; ++n) {
    Rng rng = streams.stream(static_cast<std::uint64_t>(n));
    const RbmSample s = rbm_gibbs_sample(p, options_.burn_in, rng);
    out.col(n) << s.x, s.h;
  }
  return out;
}

Vector RbmJointFamily::model_expectation(const Vector& theta) const {
  const RbmParams p = unpack_rbm(theta, nx_, nh_);
  if (std::min(nx_, nh_) <= kRbmEnumerationCutoff) return rbm_joint_moments(p, false).mean;
  Vector mean = Vector::Zero(dim_theta());
  for (Index n = 0; n < options_.expectation_samples; ++n) {
    Rng rng(mix_seed(options_.expectation_seed, static_cast<std::uint64_t>(n)));
    const RbmSample s = rbm_gibbs_sample(p, options_.burn_in, rng);
    mean += rbm_joint_statistics(s.x, s.h);
  }
  return mean / static_cast<double>(options_.expectation_samples);
}

Matrix RbmJointFamily::sufficient_statistics(const Samples& points) const {
  check_points(points, nx_ + nh_, "rbm");
  Matrix t(dim_theta(), points.cols());
  for (Index n = 0; n < points.cols(); ++n)
    t.col(n) = rbm_joint_statistics(points.col(n).head(nx_), points.col(n).tail(nh_));
  return t;
}

Matrix RbmJointFamily::score(const Vector& theta, const Samples& points) const {
  validate(theta);
  return sufficient_statistics(points).colwise() - model_expectation(theta);
}

Vector RbmJointFamily::log_density(const Vector& theta, const Samples& points) const {
  check_points(points, nx_ + nh_, "rbm");
  const RbmParams p = unpack_rbm(theta, nx_, nh_);
  const double log_z = rbm_log_partition(p);
  Vector out(points.cols());
  for (Index n = 0; n < points.cols(); ++n)
    out(n) = -rbm_energy(p, points.col(n).head(nx_), points.col(n).tail(nh_)) - log_z;
  return out;
}

Matrix RbmJointFamily::exact_fisher(const Vector& theta) const {
  validate(theta);
  if (std::min(nx_, nh_) > kRbmEnumerationCutoff)
    throw CapabilityError("rbm: layers too large for an exact Fisher matrix");
  return rbm_joint_moments(unpack_rbm(theta, nx_, nh_), true).cov;
}

Support RbmJointFamily::support(const Vector& theta) const {
  if (nx_ + nh_ > kEnumerationCutoff) throw CapabilityError("rbm: joint space too large to enumerate");
  validate(theta);
  Support s;
  s.points = enumerate_bitstrings(nx_ + nh_);
  s.probabilities = log_density(theta, s.points).array().exp().matrix();
  s.exact = true;
  return s;
}

Vector RbmJointFamily::to_expectation(const Vector& theta) const { return model_expectation(theta); }

// ---------------------------------------------------------------------------

RbmMarginalFamily::RbmMarginalFamily(Index nx, Index nh, RbmOptions options)
    : nx_(nx), nh_(nh), joint_(nx, nh, options) {}

Capabilities RbmMarginalFamily::capabilities() const {
  return {.exact_fisher = nx_ <= kEnumerationCutoff,
          .expectation_params = false,
          .latent = true,
          .enumerable = nx_ <= kEnumerationCutoff};
}

void RbmMarginalFamily::validate(const Vector& theta) const { joint_.validate(theta); }

Samples RbmMarginalFamily::sample(const Vector& theta, Index count,
                                  const StreamFactory& streams) const {
  return joint_.sample(theta, count, streams).topRows(nx_);
}

Matrix RbmMarginalFamily::score(const Vector& theta, const Samples& points) const {
  validate(theta);
  check_points(points, nx_, "rbm_marginal");
  const RbmParams p = unpack_rbm(theta, nx_, nh_);
  const Vector mean = joint_.model_expectation(theta);
  Matrix g(dim_theta(), points.cols());
  for (Index n = 0; n < points.cols(); ++n) {
    const Vector x = points.col(n);
    g.col(n) = rbm_joint_statistics(x, rbm_hidden_given_visible(p, x)) - mean;
  }
  return g;
}

Vector RbmMarginalFamily::log_density(const Vector& theta, const Samples& points) const {
  check_points(points, nx_, "rbm_marginal");
  const RbmParams p = unpack_rbm(theta, nx_, nh_);
  const double log_z = rbm_log_partition(p);
  Vector out(points.cols());
  for (Index n = 0; n < points.cols(); ++n) out(n) = unnormalized_log_marginal(p, points.col(n)) - log_z;
  return out;
}

Matrix RbmMarginalFamily::exact_fisher(const Vector& theta) const {
  const Support s = support(theta);
  const Matrix g = score(theta, s.points);
  return g * s.probabilities.asDiagonal() * g.transpose();
}

Support RbmMarginalFamily::support(const Vector& theta) const {
  if (nx_ > kEnumerationCutoff) throw CapabilityError("rbm_marginal: visible layer too large to enumerate");
  validate(theta);
  Support s;
  s.points = enumerate_bitstrings(nx_);
  s.probabilities = log_density(theta, s.points).array().exp().matrix();
  s.exact = true;
  return s;
}

}  // namespace igo
