#pragma once

#include <iosfwd>
#include <optional>

#include "igo/core/family.hpp"

namespace igo {

enum class FisherSource { exact, monte_carlo };
enum class Reliability { unchecked, pass, fail };

/// Symmetric PSD Fisher matrix with its provenance.
struct FisherMatrix {
  Matrix matrix;
  FisherSource source = FisherSource::exact;
  /// Sample count for Monte-Carlo estimates, and how many of them were distinct.
  Index samples = 0;
  Index distinct_samples = 0;
  Reliability reliability = Reliability::unchecked;
  double mean_eigenvalue = 0.0;

  Index dim() const { return matrix.rows(); }
};

/// Closed form when the family has one, otherwise sum_x P(x) g g^T over the
/// enumerated support. CapabilityError when neither is available.
FisherMatrix exact_fisher(const Family& family, const Vector& theta);

/// (1/M) sum g(x_m) g(x_m)^T over M fresh samples drawn from `streams`.
/// Rejects M < dim_theta.
FisherMatrix mc_fisher(const Family& family, const Vector& theta, Index samples,
                       const StreamFactory& streams);

/// Same estimator on given points.
FisherMatrix mc_fisher_from_points(const Family& family, const Vector& theta, const Samples& points);

enum class ReliabilityCriterion {
  /// Mean eigenvalue of F1 F2^-1 in [1/2, 2].
  mean_eigenvalue,
  /// Mean |ln eigenvalue| at most ln 2.
  log_symmetric,
};

struct ReliabilityResult {
  bool pass = false;
  bool singular = false;
  double mean_eigenvalue = 0.0;
  double mean_abs_log_eigenvalue = 0.0;
  Vector eigenvalues;
};

/// Eigenvalues of F1 F2^-1, through the generalized problem F1 v = lambda F2 v.
ReliabilityResult reliability_check(const FisherMatrix& f1, const FisherMatrix& f2,
                                    ReliabilityCriterion criterion = ReliabilityCriterion::mean_eigenvalue);

inline constexpr double kMaxFisherCondition = 1e12;

struct FisherInverse {
  Matrix inverse;
  double condition = 0.0;
  bool regularized = false;
  double ridge = 0.0;
};

/// Inverse via Cholesky; with a ridge, inverts F + ridge I and flags the result.
/// SingularFisher when the factorization fails or the condition number exceeds the limit.
FisherInverse invert(const FisherMatrix& fisher, std::optional<double> ridge = std::nullopt,
                     double max_condition = kMaxFisherCondition);

/// Solves F x = v with the same guards as invert.
Vector natural_direction(const FisherMatrix& fisher, const Vector& v,
                         std::optional<double> ridge = std::nullopt);

/// sqrt(v^T F v).
double fisher_norm(const Matrix& fisher, const Vector& v);

/// Comma-separated rows, 17 significant digits.
void write_matrix_csv(std::ostream& out, const Matrix& m);

}  // namespace igo
