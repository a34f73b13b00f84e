#pragma once

#include <functional>
#include <vector>

#include "igo/core/family.hpp"
#include "igo/core/weights.hpp"
#include "igo/objectives/objectives.hpp"

namespace igo {

/// W_theta^f at every atom of a weighted support: with q- = P(f < f(x)) and
/// q+ = P(f <= f(x)), W = w(q+) if q+ == q-, else the mean of w over [q-, q+].
Vector exact_weights(const Vector& f_values, const Vector& probabilities, const WeightScheme& scheme);

/// W_theta^f(x) for a family with an enumerable support.
double exact_weight(const Family& family, const Vector& theta, const Objective& objective,
                    const WeightScheme& scheme, const Vector& x);

/// dtheta/dt = I^-1 sum_x P(x) W(x) d ln P(x) / d theta over the family's support.
Vector flow_rhs(const Family& family, const Vector& theta, const Objective& objective,
                const WeightScheme& scheme);

/// Bernoulli flow dtheta_i/dt = sum_x P(x) W(x) (x_i - theta_i), valid on the closed cube.
Vector bernoulli_flow_rhs(const Vector& theta, const Objective& objective, const WeightScheme& scheme);

struct FlowState {
  Vector theta;
  double t = 0.0;
};

enum class Integrator { euler, rk4 };

using FlowField = std::function<Vector(const Vector&)>;

/// Fixed-step integration from t = 0 to `horizon`; states at t = k h, k = 0..K.
/// `project`, if given, is applied after every step.
std::vector<FlowState> integrate(const FlowField& rhs, const Vector& theta0, double horizon, double h,
                                 Integrator method = Integrator::rk4,
                                 const std::function<Vector(const Vector&)>& project = {});

/// Closed-form rates of the isotropic Gaussian flow on a linear function with
/// truncation weights: sigma(t) = sigma0 e^{alpha t}, and the mean moves along
/// the gradient at sigma(t) beta.
struct LinearFlowConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double q0 = 0.0;
  Index d = 0;

  double sigma(double sigma0, double t) const;
  /// m1(t) = m1(0) + (sigma0 beta / alpha)(e^{alpha t} - 1), m1(0) + sigma0 beta t when alpha = 0.
  double mean(double m0, double sigma0, double t) const;
};

/// beta = -phi(Phi^-1(q0)), alpha = (int_0^q0 Phi^-1(u)^2 du - q0) / (2 d) by adaptive quadrature.
LinearFlowConstants gaussian_linear_constants(double q0, Index d);

/// int_0^q Phi^-1(u)^2 du by adaptive Gauss-Kronrod quadrature.
double integral_quantile_squared(double q);

/// Largest dt for which the covariance ladder update with exponent j still
/// grows the variance on a linear function at truncation quantile q.
/// j = infinity (kCemLadder) gives 0, j = 0 gives +infinity, q >= 1/2 gives 0.
double critical_dt(double q, double j);

/// Threshold read off the covariance ladder with the truncated-normal elite
/// moments: growth iff 1 - (1 - dt)^j < critical_dt(q, 1), so
/// dt = 1 - (1 - critical_dt(q, 1))^(1/j), capped at 1. Agrees with
/// critical_dt for j in {0, 1, infinity}.
double critical_dt_ladder(double q, double j);

/// Expected variance ratio C'/C of the ladder update with exponent j on a
/// linear function, in the large-sample limit with truncation quantile q.
double ladder_variance_ratio(double q, double j, double dt);

/// sum_i alpha_i dtheta_i/dt for the linear objective c - sum alpha_i x_i.
double lyapunov_monitor(const Vector& theta, const Vector& alpha,
                        const WeightScheme& scheme = WeightScheme::truncation(0.5));

enum class QuantileMode {
  /// Midpoint of the set of q-quantiles {m : P(f <= m) >= q, P(f >= m) >= 1 - q}.
  midpoint,
  /// Linear interpolation of the distribution function between atoms.
  interpolated,
};

/// q-quantile of a discrete distribution of f values.
double distribution_quantile(const Vector& f_values, const Vector& probabilities, double q,
                             QuantileMode mode = QuantileMode::midpoint);

}  // namespace igo
