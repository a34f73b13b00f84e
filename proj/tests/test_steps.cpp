#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "igo/core/diagnostics.hpp"
#include "igo/core/random.hpp"
#include "igo/core/steps.hpp"
#include "igo/families/bernoulli.hpp"
#include "igo/families/gaussian.hpp"
#include "igo/fisher/fisher.hpp"

using namespace igo;
using igo::testing::max_abs;

namespace {

RankedWeights plain(const Vector& w) {
  RankedWeights r;
  r.weights = w;
  return r;
}

}  // namespace

TEST_CASE("igo step on a single bernoulli sample") {
  const BernoulliFamily fam(1);
  const Vector theta = Vector::Constant(1, 0.5);
  const Samples x = Samples::Ones(1, 1);
  const Vector next = igo_step(fam, theta, x, plain(Vector::Ones(1)), 0.1);
  CHECK(next(0) == doctest::Approx(0.55));
  CHECK(igo_step(fam, theta, x, plain(Vector::Zero(1)), 0.1) == theta);
}

TEST_CASE("igo step on bernoulli matches the closed-form update") {
  const BernoulliFamily fam(3);
  const Vector theta = Vector::Constant(3, 0.5);
  Samples x(3, 4);
  x << 1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 1;
  const std::vector<double> f{2.0, 0.5, 1.0, 3.0};
  const RankedWeights w = compute_quantile_weights(f, WeightScheme::truncation(0.5));
  const Vector generic = igo_step(fam, theta, x, w, 0.3);
  const std::vector<Index> order = rank_order(f);
  Samples ranked(3, 4);
  std::vector<double> rw(4);
  for (Index j = 0; j < 4; ++j) {
    ranked.col(j) = x.col(order[static_cast<std::size_t>(j)]);
    rw[static_cast<std::size_t>(j)] = w.weights(order[static_cast<std::size_t>(j)]);
  }
  CHECK(max_abs(generic - bernoulli_igo_update(theta, ranked, rw, 0.3)) < 1e-15);
  Samples best(2, 1);
  best << 1, 0;
  CHECK(max_abs(bernoulli_igo_update(Vector::Constant(2, 0.5), best, std::vector<double>{1.0}, 0.1) -
                (Vector(2) << 0.55, 0.45).finished()) < 1e-15);
}

TEST_CASE("igo_ml step on a one-dimensional gaussian") {
  const GaussianFamily fam(1);
  // Two points at 1 with weights 1/2 give elite mean 1 and variance 0.
  const Samples x = Samples::Ones(1, 2);
  const Vector theta = (Vector(2) << 0.0, 1.0).finished();
  // Elite variance 0 makes the ML estimate degenerate but the blended one is fine.
  const Vector next = igo_ml_step(fam, theta, x, plain(Vector::Constant(2, 0.5)), 0.5);
  CHECK(next(0) == doctest::Approx(0.5));
  CHECK(next(1) == doctest::Approx(0.75));
}

TEST_CASE("igo_ml weight-sum policies") {
  const BernoulliFamily fam(2);
  const Vector theta = Vector::Constant(2, 0.5);
  Samples x(2, 2);
  x << 1, 0, 1, 1;
  const RankedWeights half = plain(Vector::Constant(2, 0.25));
  CHECK_THROWS_AS(igo_ml_step(fam, theta, x, half, 0.5, WeightSumPolicy::strict), InvalidInput);
  const Vector renorm = igo_ml_step(fam, theta, x, half, 0.5, WeightSumPolicy::renormalize);
  CHECK(max_abs(renorm - igo_ml_step(fam, theta, x, plain(Vector::Constant(2, 0.5)), 0.5)) < 1e-15);
  const Vector general = igo_ml_step(fam, theta, x, half, 0.5, WeightSumPolicy::general);
  CHECK(max_abs(general - igo_step(fam, theta, x, half, 0.5)) < 1e-15);
}

TEST_CASE("dt = 1 gives the maximum-likelihood estimate") {
  const GaussianFamily fam(2);
  const Vector theta = pack_gaussian({Vector::Zero(2), Matrix::Identity(2, 2)});
  const Samples x = fam.sample(theta, 12, StreamFactory(3, 0, StreamTag::update));
  std::vector<double> f(12);
  for (Index i = 0; i < 12; ++i) f[static_cast<std::size_t>(i)] = x.col(i).squaredNorm();
  const RankedWeights w = compute_quantile_weights(f, WeightScheme::truncation(0.5).scaled(2.0));
  CHECK(max_abs(igo_ml_step(fam, theta, x, w, 1.0) - cem_step(fam, x, f, 0.5)) < 1e-12);
  CHECK(max_abs(smoothed_cem_step(fam, theta, x, w, 1.0, Coordinates::native) - cem_step(fam, x, f, 0.5)) < 1e-12);
}

TEST_CASE("cem step is EMNA on the elite") {
  const GaussianFamily fam(1);
  Samples x(1, 5);
  x << 3, -1, 0.5, 2, -2;
  const std::vector<double> f{3, -1, 0.5, 2, -2};
  // ceil(0.4 * 5) = 2 elites: -2 and -1.
  const Vector next = cem_step(fam, x, f, 0.4);
  CHECK(next(0) == doctest::Approx(-1.5));
  CHECK(next(1) == doctest::Approx(0.25));
  CHECK(elite_count(0.4, 5) == 2);
  CHECK(elite_count(0.3, 10) == 3);
  CHECK(elite_count(0.01, 10) == 1);
}

TEST_CASE("smoothed cem in mean and variance coordinates") {
  const GaussianFamily fam(1);
  Samples x(1, 2);
  x << 0.8, 1.2;
  const Vector theta = (Vector(2) << 0.0, 1.0).finished();
  const Vector next = smoothed_cem_step(fam, theta, x, plain(Vector::Constant(2, 0.5)), 0.5, Coordinates::native);
  CHECK(next(0) == doctest::Approx(0.5));
  CHECK(next(1) == doctest::Approx(0.52));
}

TEST_CASE("igo, igo_ml and smoothed cem coincide in expectation parameters") {
  Rng rng(99);
  const GaussianExpectationFamily gauss(1);
  const BernoulliFamily bern(5);
  for (int trial = 0; trial < 20; ++trial) {
    const double dt = 0.05 + 0.9 * uniform01(rng);
    const Vector eta = pack_gaussian(gaussian_to_expectation({Vector::Constant(1, standard_normal(rng)),
                                                              Matrix::Constant(1, 1, 0.5 + uniform01(rng))}));
    const Samples x = gauss.sample(eta, 20, StreamFactory(rng(), 0, StreamTag::update));
    std::vector<double> f(20);
    for (Index i = 0; i < 20; ++i) f[static_cast<std::size_t>(i)] = std::abs(x(0, i) - 0.3);
    const RankedWeights w = compute_quantile_weights(f, WeightScheme::truncation(0.25).scaled(4.0));
    const Vector a = igo_step(gauss, eta, x, w, dt);
    const Vector b = igo_ml_step(gauss, eta, x, w, dt);
    const Vector c = smoothed_cem_step(gauss, eta, x, w, dt, Coordinates::expectation);
    CHECK(igo::testing::rel_err(a, b) < 1e-12);
    CHECK(igo::testing::rel_err(b, c) < 1e-12);

    Vector theta(5);
    for (Index i = 0; i < 5; ++i) theta(i) = 0.1 + 0.8 * uniform01(rng);
    const Samples y = bern.sample(theta, 10, StreamFactory(rng(), 0, StreamTag::update));
    std::vector<double> g(10);
    for (Index i = 0; i < 10; ++i) g[static_cast<std::size_t>(i)] = y.col(i).sum();
    const RankedWeights v = compute_quantile_weights(g, WeightScheme::truncation(0.5).scaled(2.0));
    CHECK(igo::testing::rel_err(igo_step(bern, theta, y, v, dt), igo_ml_step(bern, theta, y, v, dt)) < 1e-12);
  }
}

TEST_CASE("vanilla step uses the raw gradient") {
  const BernoulliFamily fam(1);
  const Vector theta = Vector::Constant(1, 0.25);
  const Samples x = Samples::Ones(1, 1);
  // Score 1/theta = 4.
  CHECK(vanilla_step(fam, theta, x, plain(Vector::Ones(1)), 0.01)(0) == doctest::Approx(0.29));
}

TEST_CASE("cma step and igo_ml differ at second order") {
  const GaussianFamily fam(1);
  const Vector theta = (Vector(2) << 0.0, 1.0).finished();
  const GaussianParams g = unpack_gaussian(theta, 1);
  Samples x(1, 4);
  x << -1.0, -0.5, 0.7, 1.5;
  const Vector w = (Vector(4) << 0.5, 0.5, 0.0, 0.0).finished();
  double previous = 0.0;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
    const Vector cma = pack_gaussian(cma_update(g, x, w, dt, dt));
    const Vector ml = igo_ml_step(fam, theta, x, plain(w), dt);
    const double gap = (cma - ml).norm();
    if (previous > 0.0) CHECK(previous / gap == doctest::Approx(4.0).epsilon(0.15));
    previous = gap;
  }
}

TEST_CASE("kl diagnostics") {
  const BernoulliFamily fam(1);
  const Vector before = Vector::Constant(1, 0.5), after = Vector::Constant(1, 0.55);
  const double oracle = 0.5 * std::log(0.5 / 0.55) + 0.5 * std::log(0.5 / 0.45);
  CHECK(oracle == doctest::Approx(0.0050252).epsilon(1e-4));
  CHECK(exact_kl(fam, before, after) == doctest::Approx(oracle).epsilon(1e-12));
  // Points with the exact frequencies give the exact value.
  Samples x(1, 2);
  x << 0, 1;
  const KlEstimate est = estimate_kl(fam, before, after, x);
  CHECK(est.value == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(est.samples == 2);
}

TEST_CASE("step diagnostics and dt adaptation") {
  const BernoulliFamily fam(2);
  const Vector theta = Vector::Constant(2, 0.5);
  const Vector step = (Vector(2) << 0.01, -0.02).finished();
  const Matrix fisher = fam.exact_fisher(theta);
  Samples x(2, 2);
  x << 0, 1, 1, 0;
  const StepReport same = step_diagnostics(fam, fisher, theta, theta + step, x, step);
  REQUIRE(same.cosine_with_previous);
  CHECK(*same.cosine_with_previous == doctest::Approx(1.0));
  CHECK(same.fisher_step_norm == doctest::Approx(std::sqrt(4 * 0.0001 + 4 * 0.0004)));
  CHECK(adapt_dt(same, 0.1, 0.5) == doctest::Approx(0.1 * std::exp(0.25)));
  const StepReport back = step_diagnostics(fam, fisher, theta, theta - step, x, step);
  CHECK(*back.cosine_with_previous == doctest::Approx(-1.0));
  CHECK(adapt_dt(back, 0.1, 0.5) == doctest::Approx(0.1 * std::exp(-0.25)));
  CHECK(adapt_dt(back, 0.1, 0.5, AdaptRule::sign) == doctest::Approx(0.1 * std::exp(-0.25)));
  const StepReport first = step_diagnostics(fam, fisher, theta, theta + step, x);
  CHECK_FALSE(first.cosine_with_previous);
  CHECK(adapt_dt(first, 0.1, 0.5) == 0.1);
  CHECK(default_adapt_beta(100, 10) == 0.5);
  CHECK(default_adapt_beta(3, 10) == doctest::Approx(0.3));
}
