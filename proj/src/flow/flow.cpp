#include "igo/flow/flow.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "igo/families/bernoulli.hpp"
#include "igo/fisher/fisher.hpp"
#include "igo/flow/normal.hpp"

namespace igo {

namespace {

std::vector<Index> sorted_by(const Vector& f) {
  std::vector<Index> order(static_cast<std::size_t>(f.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return f(a) < f(b); });
  return order;
}

Vector evaluate_all(const Objective& objective, const Samples& points) {
  Vector f(points.cols());
  for (Index k = 0; k < points.cols(); ++k) {
    f(k) = objective(points.col(k));
    if (!std::isfinite(f(k))) throw InvalidInput("objective returned a non-finite value");
  }
  return f;
}

}  // namespace

Vector exact_weights(const Vector& f_values, const Vector& probabilities, const WeightScheme& scheme) {
  if (f_values.size() != probabilities.size()) throw InvalidInput("one probability per atom is required");
  const double total = probabilities.sum();
  const std::vector<Index> order = sorted_by(f_values);
  Vector w(f_values.size());
  double below = 0.0;
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t end = k;
    double mass = 0.0;
    while (end < order.size() && f_values(order[end]) == f_values(order[k]))
      mass += probabilities(order[end++]);
    const double lo = std::clamp(below / total, 0.0, 1.0);
    const double hi = std::clamp((below + mass) / total, 0.0, 1.0);
    const double value = hi > lo ? scheme.integral(lo, hi) / (hi - lo) : scheme(hi);
    for (std::size_t m = k; m < end; ++m) w(order[m]) = value;
    below += mass;
    k = end;
  }
  return w;
}

double exact_weight(const Family& family, const Vector& theta, const Objective& objective,
                    const WeightScheme& scheme, const Vector& x) {
  const Support s = family.support(theta);
  const Vector f = evaluate_all(objective, s.points);
  const double fx = objective(x);
  double below = 0.0, upto = 0.0;
  for (Index k = 0; k < f.size(); ++k) {
    if (f(k) < fx) below += s.probabilities(k);
    if (f(k) <= fx) upto += s.probabilities(k);
  }
  const double total = s.probabilities.sum();
  const double lo = std::clamp(below / total, 0.0, 1.0);
  const double hi = std::clamp(upto / total, 0.0, 1.0);
  return hi > lo ? scheme.integral(lo, hi) / (hi - lo) : scheme(hi);
}

Vector flow_rhs(const Family& family, const Vector& theta, const Objective& objective,
                const WeightScheme& scheme) {
  const Support s = family.support(theta);
  const Vector w = exact_weights(evaluate_all(objective, s.points), s.probabilities, scheme);
  const Vector g = family.score(theta, s.points) * s.probabilities.cwiseProduct(w);
  return natural_direction(exact_fisher(family, theta), g);
}

Vector bernoulli_flow_rhs(const Vector& theta, const Objective& objective, const WeightScheme& scheme) {
  const Index d = theta.size();
  if (d > kEnumerationCutoff) throw CapabilityError("bernoulli flow: dimension too large to enumerate");
  const Samples x = enumerate_bitstrings(d);
  Vector p(x.cols());
  for (Index k = 0; k < x.cols(); ++k) {
    double prob = 1.0;
    for (Index i = 0; i < d; ++i) prob *= x(i, k) > 0.5 ? theta(i) : 1.0 - theta(i);
    p(k) = prob;
  }
  const Vector w = exact_weights(evaluate_all(objective, x), p, scheme);
  Vector rhs = Vector::Zero(d);
  for (Index k = 0; k < x.cols(); ++k)
    if (p(k) > 0.0) rhs += p(k) * w(k) * (x.col(k) - theta);
  return rhs;
}

std::vector<FlowState> integrate(const FlowField& rhs, const Vector& theta0, double horizon, double h,
                                 Integrator method, const std::function<Vector(const Vector&)>& project) {
  if (!(h > 0.0)) throw InvalidInput("integrate: step must be positive");
  if (!(horizon >= 0.0)) throw InvalidInput("integrate: horizon must be non-negative");
  const Index steps = static_cast<Index>(std::llround(horizon / h));
  std::vector<FlowState> out;
  out.reserve(static_cast<std::size_t>(steps + 1));
  out.push_back({theta0, 0.0});
  Vector theta = theta0;
  for (Index k = 1; k <= steps; ++k) {
    if (method == Integrator::euler) {
      theta = theta + h * rhs(theta);
    } else {
      const Vector k1 = rhs(theta);
      const Vector k2 = rhs(theta + 0.5 * h * k1);
      const Vector k3 = rhs(theta + 0.5 * h * k2);
      const Vector k4 = rhs(theta + h * k3);
      theta = theta + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (project) theta = project(theta);
    out.push_back({theta, static_cast<double>(k) * h});
  }
  return out;
}

double LinearFlowConstants::sigma(double sigma0, double t) const { return sigma0 * std::exp(alpha * t); }

double LinearFlowConstants::mean(double m0, double sigma0, double t) const {
  if (alpha == 0.0) return m0 + sigma0 * beta * t;
  return m0 + sigma0 * beta / alpha * std::expm1(alpha * t);
}

double integral_quantile_squared(double q) {
  if (!(q > 0.0 && q <= 1.0)) throw InvalidInput("quantile integral: q must lie in (0, 1]");
  auto integrand = [](double u) {
    const double z = normal::quantile(u);
    return std::isfinite(z) ? z * z : 0.0;
  };
  // tanh-sinh copes with the logarithmic singularity at u = 0.
  boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate(integrand, 0.0, q, 1e-14);
}

LinearFlowConstants gaussian_linear_constants(double q0, Index d) {
  if (!(q0 > 0.0 && q0 <= 1.0)) throw InvalidInput("linear constants: q0 must lie in (0, 1]");
  if (d < 1) throw InvalidInput("linear constants: dimension must be positive");
  LinearFlowConstants c;
  c.q0 = q0;
  c.d = d;
  c.beta = q0 < 1.0 ? -normal::pdf(normal::quantile(q0)) : 0.0;
  c.alpha = q0 == 0.5 ? 0.0 : (integral_quantile_squared(q0) - q0) / (2.0 * static_cast<double>(d));
  return c;
}

double critical_dt(double q, double j) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidInput("critical dt: q must lie in (0, 1)");
  if (q >= 0.5) return 0.0;
  if (j == 0.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(j)) return 0.0;
  const double b = normal::quantile(1.0 - q);
  const double first = q * b * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * b * b);
  if (j == 1.0) return first;
  if (j == 2.0) return std::sqrt(1.0 + first) - 1.0;
  throw InvalidInput("critical dt: j must be 0, 1, 2 or infinity");
}

double critical_dt_ladder(double q, double j) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidInput("critical dt: q must lie in (0, 1)");
  if (q >= 0.5) return 0.0;
  if (j == 0.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(j)) return 0.0;
  const double first = critical_dt(q, 1.0);
  if (first >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - first, 1.0 / j);
}

double ladder_variance_ratio(double q, double j, double dt) {
  // Elite = lower q-tail of N(0, 1): mean -phi(b)/q, variance 1 + b phi(b)/q - mean^2.
  const double b = normal::quantile(1.0 - q);
  const double phi = normal::pdf(b);
  const double mu = -phi / q;
  const double var = 1.0 + b * phi / q - mu * mu;
  const double cross = std::isinf(j) ? 0.0 : std::pow(1.0 - dt, j);
  return (1.0 - dt) + dt * var + dt * cross * mu * mu;
}

double lyapunov_monitor(const Vector& theta, const Vector& alpha, const WeightScheme& scheme) {
  if (theta.size() != alpha.size()) throw InvalidInput("lyapunov monitor: dimension mismatch");
  const ObjectivePtr f = make_linear(alpha, alpha.sum());
  return alpha.dot(bernoulli_flow_rhs(theta, *f, scheme));
}

double distribution_quantile(const Vector& f_values, const Vector& probabilities, double q,
                             QuantileMode mode) {
  if (f_values.size() == 0 || f_values.size() != probabilities.size())
    throw InvalidInput("distribution quantile: bad atoms");
  if (!(q > 0.0 && q < 1.0)) throw InvalidInput("distribution quantile: q must lie in (0, 1)");
  const std::vector<Index> order = sorted_by(f_values);
  const double total = probabilities.sum();
  // Distinct values with their masses.
  std::vector<double> value, mass;
  for (Index k : order) {
    if (!value.empty() && f_values(k) == value.back()) {
      mass.back() += probabilities(k) / total;
    } else {
      value.push_back(f_values(k));
      mass.push_back(probabilities(k) / total);
    }
  }
  const std::size_t n = value.size();
  if (mode == QuantileMode::interpolated) {
    // Piecewise-linear interpolation through (mid-cumulative mass, value).
    double below = 0.0;
    std::vector<double> mid(n);
    for (std::size_t k = 0; k < n; ++k) {
      mid[k] = below + 0.5 * mass[k];
      below += mass[k];
    }
    if (q <= mid.front()) return value.front();
    if (q >= mid.back()) return value.back();
    const auto it = std::upper_bound(mid.begin(), mid.end(), q);
    const std::size_t hi = static_cast<std::size_t>(it - mid.begin());
    const std::size_t lo = hi - 1;
    const double s = (q - mid[lo]) / (mid[hi] - mid[lo]);
    return value[lo] + s * (value[hi] - value[lo]);
  }
  // Smallest m with P(f <= m) >= q, largest m with P(f >= m) >= 1 - q.
  const double tol = 1e-12;
  double cum = 0.0;
  double lower = value.back();
  for (std::size_t k = 0; k < n; ++k) {
    cum += mass[k];
    if (cum >= q - tol) {
      lower = value[k];
      break;
    }
  }
  double survival = 0.0;
  double upper = value.front();
  for (std::size_t k = n; k-- > 0;) {
    survival += mass[k];
    if (survival >= 1.0 - q - tol) {
      upper = value[k];
      break;
    }
  }
  return 0.5 * (lower + std::max(lower, upper));
}

}  // namespace igo
