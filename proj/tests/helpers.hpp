#pragma once

#include <cmath>

#include "igo/core/family.hpp"

namespace igo::testing {

/// Central finite difference of ln P_theta(x) in theta, one column per point.
inline Matrix fd_score(const Family& family, const Vector& theta, const Samples& points, double h = 1e-6) {
  Matrix g(theta.size(), points.cols());
  for (Index a = 0; a < theta.size(); ++a) {
    Vector up = theta, down = theta;
    up(a) += h;
    down(a) -= h;
    g.row(a) = ((family.log_density(up, points) - family.log_density(down, points)) / (2.0 * h)).transpose();
  }
  return g;
}

/// KL(P_theta || P_theta') by direct summation over an exact support.
inline double support_kl(const Family& family, const Vector& from, const Vector& to) {
  const Support s = family.support(from);
  const Vector lp = family.log_density(from, s.points);
  const Vector lq = family.log_density(to, s.points);
  double kl = 0.0;
  for (Index i = 0; i < lp.size(); ++i)
    if (s.probabilities(i) > 0.0) kl += s.probabilities(i) * (lp(i) - lq(i));
  return kl;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double rel_err(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

}  // namespace igo::testing
