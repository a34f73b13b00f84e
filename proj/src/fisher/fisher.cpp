#include "igo/fisher/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace igo {

namespace {

Index count_distinct(const Samples& points) {
  std::vector<Index> order(static_cast<std::size_t>(points.cols()));
  for (Index i = 0; i < points.cols(); ++i) order[static_cast<std::size_t>(i)] = i;
  auto less = [&](Index a, Index b) {
    for (Index r = 0; r < points.rows(); ++r) {
      if (points(r, a) < points(r, b)) return true;
      if (points(r, a) > points(r, b)) return false;
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  Index distinct = points.cols() > 0 ? 1 : 0;
  for (std::size_t k = 1; k < order.size(); ++k)
    if (less(order[k - 1], order[k])) ++distinct;
  return distinct;
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

FisherMatrix exact_fisher(const Family& family, const Vector& theta) {
  FisherMatrix f;
  f.source = FisherSource::exact;
  if (family.capabilities().exact_fisher) {
    f.matrix = symmetrized(family.exact_fisher(theta));
    return f;
  }
  if (!family.capabilities().enumerable)
    throw CapabilityError(family.name() + ": no exact Fisher matrix available");
  const Support s = family.support(theta);
  const Matrix g = family.score(theta, s.points);
  f.matrix = symmetrized(g * s.probabilities.asDiagonal() * g.transpose());
  return f;
}

FisherMatrix mc_fisher_from_points(const Family& family, const Vector& theta, const Samples& points) {
  const Index m = points.cols();
  if (m < family.dim_theta())
    throw InvalidInput("Monte-Carlo Fisher needs at least dim_theta = " +
                       std::to_string(family.dim_theta()) + " samples, got " + std::to_string(m));
  const Matrix g = family.score(theta, points);
  FisherMatrix f;
  f.source = FisherSource::monte_carlo;
  f.samples = m;
  f.distinct_samples = count_distinct(points);
  f.matrix = symmetrized(g * g.transpose() / static_cast<double>(m));
  return f;
}

FisherMatrix mc_fisher(const Family& family, const Vector& theta, Index samples,
                       const StreamFactory& streams) {
  if (samples < family.dim_theta())
    throw InvalidInput("Monte-Carlo Fisher needs at least dim_theta = " +
                       std::to_string(family.dim_theta()) + " samples, got " + std::to_string(samples));
  return mc_fisher_from_points(family, theta, family.sample(theta, samples, streams));
}

ReliabilityResult reliability_check(const FisherMatrix& f1, const FisherMatrix& f2,
                                    ReliabilityCriterion criterion) {
  if (f1.dim() != f2.dim()) throw InvalidInput("reliability check: dimension mismatch");
  ReliabilityResult r;
  Eigen::LLT<Matrix> llt(f2.matrix);
  if (llt.info() != Eigen::Success) {
    r.singular = true;
    return r;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(f1.matrix, f2.matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    r.singular = true;
    return r;
  }
  r.eigenvalues = solver.eigenvalues();
  r.mean_eigenvalue = r.eigenvalues.mean();
  r.mean_abs_log_eigenvalue = r.eigenvalues.array().abs().max(1e-300).log().abs().mean();
  switch (criterion) {
    case ReliabilityCriterion::mean_eigenvalue:
      r.pass = r.mean_eigenvalue >= 0.5 && r.mean_eigenvalue <= 2.0;
      break;
    case ReliabilityCriterion::log_symmetric:
      r.pass = (r.eigenvalues.array() > 0.0).all() && r.mean_abs_log_eigenvalue <= std::log(2.0);
      break;
  }
  return r;
}

FisherInverse invert(const FisherMatrix& fisher, std::optional<double> ridge, double max_condition) {
  const Index p = fisher.dim();
  FisherInverse out;
  Matrix f = symmetrized(fisher.matrix);
  if (ridge) {
    if (!(*ridge > 0.0)) throw InvalidInput("ridge must be positive");
    f += *ridge * Matrix::Identity(p, p);
    out.regularized = true;
    out.ridge = *ridge;
  }
  if (!f.allFinite()) throw SingularFisher("Fisher matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(f, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  out.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(out.condition <= max_condition))
    throw SingularFisher("Fisher matrix is singular or ill-conditioned (condition " +
                         std::to_string(out.condition) + ")");
  Eigen::LLT<Matrix> llt(f);
  if (llt.info() != Eigen::Success) throw SingularFisher("Cholesky factorization of the Fisher matrix failed");
  out.inverse = symmetrized(llt.solve(Matrix::Identity(p, p)));
  return out;
}

Vector natural_direction(const FisherMatrix& fisher, const Vector& v, std::optional<double> ridge) {
  return invert(fisher, ridge).inverse * v;
}

double fisher_norm(const Matrix& fisher, const Vector& v) {
  return std::sqrt(std::max(0.0, v.dot(fisher * v)));
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  char buf[40];
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace igo
