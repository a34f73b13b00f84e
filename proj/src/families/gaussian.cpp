#include "igo/families/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "igo/flow/normal.hpp"

namespace igo {

namespace {

void check_points(const Samples& points, Index d, const char* who) {
  if (points.rows() != d)
    throw InvalidInput(std::string(who) + ": expected points of dimension " + std::to_string(d));
}

Samples standard_normals(Index d, Index count, const StreamFactory& streams) {
  Samples z(d, count);
  for (Index n = 0; n < count; ++n) {
    Rng rng = streams.stream(static_cast<std::uint64_t>(n));
    for (Index i = 0; i < d; ++i) z(i, n) = standard_normal(rng);
  }
  return z;
}

Eigen::LLT<Matrix> factor_spd(const Matrix& c, const char* who) {
  Eigen::LLT<Matrix> llt(c);
  if (llt.info() != Eigen::Success) throw DomainError(std::string(who) + ": covariance is not positive definite");
  return llt;
}

Support scaled_grid(const Vector& m, double sigma, Index nodes) {
  Support s = standard_normal_grid(m.size(), nodes);
  s.points = (sigma * s.points).colwise() + m;
  return s;
}

}  // namespace

Vector vech_upper(const Matrix& s) {
  const Index d = s.rows();
  Vector v(d * (d + 1) / 2);
  Index k = 0;
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j) v(k++) = s(i, j);
  return v;
}

Matrix unvech_upper(const Vector& v, Index d) {
  if (v.size() != d * (d + 1) / 2) throw InvalidInput("unvech: wrong vector length");
  Matrix s(d, d);
  Index k = 0;
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j) {
      s(i, j) = v(k);
      s(j, i) = v(k);
      ++k;
    }
  return s;
}

Vector pack_gaussian(const GaussianParams& params) {
  const Index d = params.mean.size();
  Vector theta(d + d * (d + 1) / 2);
  theta << params.mean, vech_upper(params.cov);
  return theta;
}

GaussianParams unpack_gaussian(const Vector& theta, Index d) {
  if (theta.size() != d + d * (d + 1) / 2) throw InvalidInput("gaussian: wrong parameter length");
  return {theta.head(d), unvech_upper(theta.tail(theta.size() - d), d)};
}

bool is_positive_definite(const Matrix& c) {
  if (!c.allFinite()) return false;
  Eigen::LLT<Matrix> llt(c);
  return llt.info() == Eigen::Success;
}

GaussianParams gaussian_to_expectation(const GaussianParams& params) {
  return {params.mean, params.cov + params.mean * params.mean.transpose()};
}

GaussianParams gaussian_from_expectation(const GaussianParams& moments) {
  GaussianParams out{moments.mean, moments.cov - moments.mean * moments.mean.transpose()};
  if (!is_positive_definite(out.cov))
    throw DegenerateUpdate("gaussian: implied covariance is not positive definite");
  return out;
}

Support standard_normal_grid(Index d, Index nodes) {
  if (nodes < 1) throw InvalidInput("quadrature grid needs at least one node");
  double total = std::pow(static_cast<double>(nodes), static_cast<double>(d));
  if (total > 5e7) throw CapabilityError("quadrature grid too large");
  const Index count = static_cast<Index>(total);
  Vector z(nodes);
  for (Index k = 0; k < nodes; ++k)
    z(k) = normal::quantile((static_cast<double>(k) + 0.5) / static_cast<double>(nodes));
  Support s;
  s.points.resize(d, count);
  s.probabilities = Vector::Constant(count, 1.0 / static_cast<double>(count));
  s.exact = false;
  for (Index c = 0; c < count; ++c) {
    Index rest = c;
    for (Index i = 0; i < d; ++i) {
      s.points(i, c) = z(rest % nodes);
      rest /= nodes;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------

GaussianFamily::GaussianFamily(Index d) : d_(d) {
  if (d < 1) throw InvalidInput("gaussian: dimension must be positive");
}

Capabilities GaussianFamily::capabilities() const {
  return {.exact_fisher = true, .expectation_params = true, .latent = false, .enumerable = false};
}

void GaussianFamily::validate(const Vector& theta) const {
  const GaussianParams p = unpack_gaussian(theta, d_);
  if (!p.mean.allFinite()) throw DomainError("gaussian: non-finite mean");
  factor_spd(p.cov, "gaussian");
}

Samples GaussianFamily::sample(const Vector& theta, Index count,
                               const StreamFactory& streams) const {
  const GaussianParams p = unpack_gaussian(theta, d_);
  const Matrix l = factor_spd(p.cov, "gaussian").matrixL();
  return (l * standard_normals(d_, count, streams)).colwise() + p.mean;
}

Matrix GaussianFamily::score(const Vector& theta, const Samples& points) const {
  check_points(points, d_, "gaussian");
  const GaussianParams p = unpack_gaussian(theta, d_);
  const Matrix prec = factor_spd(p.cov, "gaussian").solve(Matrix::Identity(d_, d_));
  Matrix g(dim_theta(), points.cols());
  for (Index n = 0; n < points.cols(); ++n) {
    const Vector u = prec * (points.col(n) - p.mean);
    g.col(n).head(d_) = u;
    // dlnP/dC = (P S P - P) / 2, off-diagonal entries counted twice.
    const Matrix gc = 0.5 * (u * u.transpose() - prec);
    Index k = d_;
    for (Index i = 0; i < d_; ++i)
      for (Index j = i; j < d_; ++j) g(k++, n) = i == j ? gc(i, i) : 2.0 * gc(i, j);
  }
  return g;
}

Vector GaussianFamily::log_density(const Vector& theta, const Samples& points) const {
  check_points(points, d_, "gaussian");
  const GaussianParams p = unpack_gaussian(theta, d_);
  const auto llt = factor_spd(p.cov, "gaussian");
  const Matrix l = llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const double base = -0.5 * (static_cast<double>(d_) * std::log(2.0 * std::numbers::pi) + log_det);
  const Matrix r = llt.matrixL().solve(points.colwise() - p.mean);
  return (base - 0.5 * r.colwise().squaredNorm().array()).matrix().transpose();
}

Matrix GaussianFamily::exact_fisher(const Vector& theta) const {
  const GaussianParams p = unpack_gaussian(theta, d_);
  const Matrix prec = factor_spd(p.cov, "gaussian").solve(Matrix::Identity(d_, d_));
  const Index q = d_ * (d_ + 1) / 2;
  Matrix f = Matrix::Zero(dim_theta(), dim_theta());
  f.topLeftCorner(d_, d_) = prec;
  // I_ab = tr(P E_a P E_b) / 2 for the symmetric basis E_ij = e_i e_j^T + e_j e_i^T (i < j).
  std::vector<std::pair<Index, Index>> idx;
  for (Index i = 0; i < d_; ++i)
    for (Index j = i; j < d_; ++j) idx.emplace_back(i, j);
  auto basis = [&](Index a) {
    Matrix e = Matrix::Zero(d_, d_);
    e(idx[a].first, idx[a].second) = 1.0;
    e(idx[a].second, idx[a].first) = 1.0;
    return e;
  };
  std::vector<Matrix> pep(static_cast<std::size_t>(q));
  for (Index a = 0; a < q; ++a) pep[static_cast<std::size_t>(a)] = prec * basis(a);
  for (Index a = 0; a < q; ++a)
    for (Index b = a; b < q; ++b) {
      const double v =
          0.5 * (pep[static_cast<std::size_t>(a)] * pep[static_cast<std::size_t>(b)]).trace();
      f(d_ + a, d_ + b) = v;
      f(d_ + b, d_ + a) = v;
    }
  return f;
}

Matrix GaussianFamily::sufficient_statistics(const Samples& points) const {
  check_points(points, d_, "gaussian");
  Matrix t(dim_theta(), points.cols());
  for (Index n = 0; n < points.cols(); ++n) {
    t.col(n).head(d_) = points.col(n);
    t.col(n).tail(dim_theta() - d_) = vech_upper(points.col(n) * points.col(n).transpose());
  }
  return t;
}

Vector GaussianFamily::to_expectation(const Vector& theta) const {
  return pack_gaussian(gaussian_to_expectation(unpack_gaussian(theta, d_)));
}

Vector GaussianFamily::from_expectation(const Vector& mean_statistics) const {
  return pack_gaussian(gaussian_from_expectation(unpack_gaussian(mean_statistics, d_)));
}

Vector GaussianFamily::max_likelihood(const Samples& points, const Vector& weights) const {
  check_points(points, d_, "gaussian");
  if (points.cols() != weights.size()) throw InvalidInput("one weight per point is required");
  if ((weights.array() < 0.0).any()) throw InvalidInput("maximum likelihood needs non-negative weights");
  if ((weights.array() > 0.0).count() < min_ml_points())
    throw DegenerateUpdate("gaussian: too few weighted points for a covariance estimate");
  const GaussianParams e = elite_statistics(points, weights);
  if (!is_positive_definite(e.cov))
    throw DegenerateUpdate("gaussian: elite covariance is not positive definite");
  return pack_gaussian(e);
}

// ---------------------------------------------------------------------------

GaussianExpectationFamily::GaussianExpectationFamily(Index d) : d_(d), base_(d) {}

Capabilities GaussianExpectationFamily::capabilities() const {
  return {.exact_fisher = true, .expectation_params = true, .latent = false, .enumerable = false};
}

Vector GaussianExpectationFamily::to_mean_covariance(const Vector& theta) const {
  const GaussianParams moments = unpack_gaussian(theta, d_);
  return pack_gaussian({moments.mean, moments.cov - moments.mean * moments.mean.transpose()});
}

void GaussianExpectationFamily::validate(const Vector& theta) const {
  base_.validate(to_mean_covariance(theta));
}

Matrix GaussianExpectationFamily::jacobian(const Vector& theta) const {
  const Vector m = theta.head(d_);
  const Index p = dim_theta();
  Matrix j = Matrix::Identity(p, p);
  // c_ij = s_ij - m_i m_j.
  Index k = d_;
  for (Index a = 0; a < d_; ++a)
    for (Index b = a; b < d_; ++b) {
      j(k, a) -= m(b);
      j(k, b) -= m(a);
      ++k;
    }
  return j;
}

Samples GaussianExpectationFamily::sample(const Vector& theta, Index count,
                                          const StreamFactory& streams) const {
  return base_.sample(to_mean_covariance(theta), count, streams);
}

Matrix GaussianExpectationFamily::score(const Vector& theta, const Samples& points) const {
  return jacobian(theta).transpose() * base_.score(to_mean_covariance(theta), points);
}

Vector GaussianExpectationFamily::log_density(const Vector& theta, const Samples& points) const {
  return base_.log_density(to_mean_covariance(theta), points);
}

Matrix GaussianExpectationFamily::exact_fisher(const Vector& theta) const {
  const Matrix j = jacobian(theta);
  return j.transpose() * base_.exact_fisher(to_mean_covariance(theta)) * j;
}

Matrix GaussianExpectationFamily::sufficient_statistics(const Samples& points) const {
  return base_.sufficient_statistics(points);
}

Vector GaussianExpectationFamily::from_expectation(const Vector& mean_statistics) const {
  gaussian_from_expectation(unpack_gaussian(mean_statistics, d_));
  return mean_statistics;
}

// ---------------------------------------------------------------------------

IsotropicGaussianFamily::IsotropicGaussianFamily(Index d, Index grid_nodes)
    : d_(d), grid_nodes_(grid_nodes) {
  if (d < 1) throw InvalidInput("isotropic_gaussian: dimension must be positive");
}

Capabilities IsotropicGaussianFamily::capabilities() const {
  return {.exact_fisher = true, .expectation_params = false, .latent = false,
          .enumerable = grid_nodes_ > 0};
}

void IsotropicGaussianFamily::validate(const Vector& theta) const {
  if (theta.size() != d_ + 1) throw InvalidInput("isotropic_gaussian: wrong parameter length");
  if (!theta.allFinite()) throw DomainError("isotropic_gaussian: non-finite parameter");
}

Samples IsotropicGaussianFamily::sample(const Vector& theta, Index count,
                                        const StreamFactory& streams) const {
  validate(theta);
  const double sigma = std::exp(theta(d_));
  return (sigma * standard_normals(d_, count, streams)).colwise() + theta.head(d_);
}

Matrix IsotropicGaussianFamily::score(const Vector& theta, const Samples& points) const {
  validate(theta);
  check_points(points, d_, "isotropic_gaussian");
  const double var = std::exp(2.0 * theta(d_));
  const Matrix r = points.colwise() - theta.head(d_);
  Matrix g(d_ + 1, points.cols());
  g.topRows(d_) = r / var;
  g.row(d_) = (r.colwise().squaredNorm().array() / var - static_cast<double>(d_)).matrix();
  return g;
}

Vector IsotropicGaussianFamily::log_density(const Vector& theta, const Samples& points) const {
  check_points(points, d_, "isotropic_gaussian");
  const double s = theta(d_);
  const double var = std::exp(2.0 * s);
  const double dd = static_cast<double>(d_);
  const double base = -0.5 * dd * std::log(2.0 * std::numbers::pi) - dd * s;
  const Matrix r = points.colwise() - theta.head(d_);
  return (base - 0.5 * r.colwise().squaredNorm().array() / var).matrix().transpose();
}

Matrix IsotropicGaussianFamily::exact_fisher(const Vector& theta) const {
  validate(theta);
  Vector diag(d_ + 1);
  diag.head(d_).setConstant(std::exp(-2.0 * theta(d_)));
  diag(d_) = 2.0 * static_cast<double>(d_);
  return diag.asDiagonal();
}

Support IsotropicGaussianFamily::support(const Vector& theta) const {
  if (grid_nodes_ < 1) throw CapabilityError("isotropic_gaussian: no quadrature grid configured");
  validate(theta);
  return scaled_grid(theta.head(d_), std::exp(theta(d_)), grid_nodes_);
}

// ---------------------------------------------------------------------------

GaussianMeanFamily::GaussianMeanFamily(Index d, Index grid_nodes) : d_(d), grid_nodes_(grid_nodes) {
  if (d < 1) throw InvalidInput("gaussian_mean: dimension must be positive");
}

Capabilities GaussianMeanFamily::capabilities() const {
  return {.exact_fisher = true, .expectation_params = true, .latent = false,
          .enumerable = grid_nodes_ > 0};
}

void GaussianMeanFamily::validate(const Vector& theta) const {
  if (theta.size() != d_) throw InvalidInput("gaussian_mean: wrong parameter length");
  if (!theta.allFinite()) throw DomainError("gaussian_mean: non-finite mean");
}

Samples GaussianMeanFamily::sample(const Vector& theta, Index count,
                                   const StreamFactory& streams) const {
  validate(theta);
  return standard_normals(d_, count, streams).colwise() + theta;
}

Matrix GaussianMeanFamily::score(const Vector& theta, const Samples& points) const {
  validate(theta);
  check_points(points, d_, "gaussian_mean");
  return points.colwise() - theta;
}

Vector GaussianMeanFamily::log_density(const Vector& theta, const Samples& points) const {
  check_points(points, d_, "gaussian_mean");
  const double base = -0.5 * static_cast<double>(d_) * std::log(2.0 * std::numbers::pi);
  return (base - 0.5 * (points.colwise() - theta).colwise().squaredNorm().array())
      .matrix()
      .transpose();
}

Matrix GaussianMeanFamily::exact_fisher(const Vector& theta) const {
  validate(theta);
  return Matrix::Identity(d_, d_);
}

Support GaussianMeanFamily::support(const Vector& theta) const {
  if (grid_nodes_ < 1) throw CapabilityError("gaussian_mean: no quadrature grid configured");
  validate(theta);
  return scaled_grid(theta, 1.0, grid_nodes_);
}

// ---------------------------------------------------------------------------

GaussianParams elite_statistics(const Samples& points, const Vector& weights) {
  if (points.cols() != weights.size()) throw InvalidInput("one weight per point is required");
  const double total = weights.sum();
  if (!(total > 0.0)) throw DegenerateUpdate("elite statistics: weights sum to zero");
  const Vector mean = points * weights / total;
  const Matrix centered = points.colwise() - mean;
  const Matrix cov = centered * weights.asDiagonal() * centered.transpose() / total;
  return {mean, 0.5 * (cov + cov.transpose())};
}

GaussianParams cma_update(const GaussianParams& params, const Samples& points,
                          const Vector& weights, double eta_m, double eta_c) {
  if (points.cols() != weights.size()) throw InvalidInput("one weight per point is required");
  const Matrix centered = points.colwise() - params.mean;
  const double wsum = weights.sum();
  Matrix outer = centered * weights.asDiagonal() * centered.transpose();
  outer = 0.5 * (outer + outer.transpose());
  GaussianParams out{params.mean + eta_m * (centered * weights),
                     params.cov + eta_c * (outer - wsum * params.cov)};
  if (!is_positive_definite(out.cov)) throw DegenerateUpdate("cma: covariance lost positive definiteness");
  return out;
}

GaussianParams emna_update(const Samples& points, const Vector& weights) {
  if ((weights.array() < 0.0).any()) throw InvalidInput("emna needs non-negative weights");
  GaussianParams out = elite_statistics(points, weights);
  if (!is_positive_definite(out.cov)) throw DegenerateUpdate("emna: elite covariance is singular");
  return out;
}

GaussianParams unified_update(const GaussianParams& params, const GaussianParams& elite, double dt,
                              double j) {
  const Vector shift = elite.mean - params.mean;
  GaussianParams out{(1.0 - dt) * params.mean + dt * elite.mean,
                     (1.0 - dt) * params.cov + dt * elite.cov};
  if (!std::isinf(j)) out.cov += dt * std::pow(1.0 - dt, j) * (shift * shift.transpose());
  if (!is_positive_definite(out.cov))
    throw DegenerateUpdate("unified update: covariance lost positive definiteness");
  return out;
}

Matrix symmetric_exp(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  return eig.eigenvectors() * eig.eigenvalues().array().exp().matrix().asDiagonal() *
         eig.eigenvectors().transpose();
}

XnesState xnes_update(const XnesState& state, const Samples& points, const Vector& weights,
                      double eta_m, double eta_c) {
  if (points.cols() != weights.size()) throw InvalidInput("one weight per point is required");
  const Index d = state.mean.size();
  const Matrix z = state.sqrt_cov.partialPivLu().solve(points.colwise() - state.mean);
  Matrix g = z * weights.asDiagonal() * z.transpose() - weights.sum() * Matrix::Identity(d, d);
  return {state.mean + eta_m * state.sqrt_cov * (z * weights),
          state.sqrt_cov * symmetric_exp(0.5 * eta_c * g)};
}

GaussianParams gaussian_step(GaussianUpdate kind, const GaussianParams& params,
                             const Samples& points, const Vector& weights,
                             const GaussianStepOptions& options) {
  switch (kind) {
    case GaussianUpdate::cma:
      return cma_update(params, points, weights, options.eta_m, options.eta_c);
    case GaussianUpdate::emna:
      return emna_update(points, weights);
    case GaussianUpdate::xnes: {
      const Matrix a = factor_spd(params.cov, "xnes").matrixL();
      const XnesState next = xnes_update({params.mean, a}, points, weights, options.eta_m, options.eta_c);
      return {next.mean, next.cov()};
    }
    case GaussianUpdate::unified:
      return unified_update(params, elite_statistics(points, weights), options.dt, options.j);
  }
  throw InvalidInput("unknown gaussian update");
}

}  // namespace igo
