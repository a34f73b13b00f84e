#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace igo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Sample batch: one point per column.
using Samples = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected input (non-finite objective value, dimension mismatch, bad option).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Parameter outside the family's domain, e.g. a Bernoulli probability on the boundary.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The family does not support the requested quantity (or the instance is too large for it).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Fisher matrix could not be factorized or is too ill-conditioned to invert.
class SingularFisher : public Error {
 public:
  using Error::Error;
};

/// An update produced parameters outside the valid domain (non-SPD covariance, too few elites).
class DegenerateUpdate : public Error {
 public:
  using Error::Error;
};

}  // namespace igo
