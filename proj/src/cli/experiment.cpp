#include "igo/cli/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "igo/core/diagnostics.hpp"
#include "igo/core/noisy.hpp"
#include "igo/core/spec_string.hpp"
#include "igo/core/steps.hpp"
#include "igo/families/bernoulli.hpp"
#include "igo/families/gaussian.hpp"
#include "igo/families/rbm.hpp"
#include "igo/families/reparam.hpp"
#include "igo/fisher/fisher.hpp"
#include "igo/flow/flow.hpp"

namespace igo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const Family& unlifted(const Family& family) {
  if (const auto* lift = dynamic_cast<const NoisyLiftFamily*>(&family)) return lift->base();
  return family;
}

double report_quantile(const Problem& p) {
  if (p.scheme && p.scheme->kind() == WeightScheme::Kind::truncation) {
    const double q = p.scheme->selection_quantile();
    return q < 1.0 ? q : 0.5;
  }
  return 0.5;
}

RankedWeights batch_weights(const Problem& p, const std::vector<double>& values, double dt) {
  if (p.scheme) return compute_quantile_weights(values, *p.scheme, p.rule);
  const std::vector<double> schedule = pbil_rank_weights(static_cast<std::size_t>(p.pbil_mu), dt);
  return rank_position_weights(values, schedule);
}

double weight_variance(const Problem& p) {
  if (p.scheme) return p.scheme->variance();
  return kNaN;
}

}  // namespace

WeightScheme parse_scheme(const std::string& spec) {
  const SpecString s = SpecString::parse(spec);
  WeightScheme w = WeightScheme::truncation(0.5);
  if (s.kind == "truncation") {
    s.require_known({"q", "scale", "shift"});
    w = WeightScheme::truncation(s.real("q"));
  } else if (s.kind == "signed_median") {
    s.require_known({"scale", "shift"});
    w = WeightScheme::signed_median();
  } else if (s.kind == "table") {
    s.require_known({"nodes", "scale", "shift"});
    const Vector flat = s.list("nodes");
    if (flat.size() % 2 != 0) throw InvalidInput("table scheme: nodes must come in (quantile, value) pairs");
    std::vector<std::pair<double, double>> nodes;
    for (Index k = 0; k < flat.size(); k += 2) nodes.emplace_back(flat(k), flat(k + 1));
    w = WeightScheme::table(std::move(nodes));
  } else {
    throw InvalidInput("unknown weight scheme '" + s.kind + "'");
  }
  if (s.has("scale")) w = w.scaled(s.real("scale"));
  if (s.has("shift")) w = w.shifted(s.real("shift"));
  return w;
}

Problem build_problem(const ExperimentConfig& config) {
  Problem p;
  const SpecString fam = SpecString::parse(config.family);
  p.family_kind = fam.kind;
  RbmOptions rbm_options;
  rbm_options.sampler = config.rbm_sampler == "gibbs" ? RbmSampler::gibbs : RbmSampler::exact;
  rbm_options.burn_in = config.gibbs_burn_in;
  FamilyPtr family;
  if (fam.kind == "bernoulli") {
    fam.require_known({"d", "eps", "lift"});
    family = std::make_shared<BernoulliFamily>(fam.integer("d"), fam.real("eps", 1e-6));
  } else if (fam.kind == "bernoulli_logit") {
    fam.require_known({"d", "lift"});
    family = std::make_shared<BernoulliLogitFamily>(fam.integer("d"));
  } else if (fam.kind == "gaussian") {
    fam.require_known({"d", "lift"});
    family = std::make_shared<GaussianFamily>(fam.integer("d"));
  } else if (fam.kind == "gaussian_expectation") {
    fam.require_known({"d", "lift"});
    family = std::make_shared<GaussianExpectationFamily>(fam.integer("d"));
  } else if (fam.kind == "isotropic_gaussian") {
    fam.require_known({"d", "grid", "lift"});
    family = std::make_shared<IsotropicGaussianFamily>(fam.integer("d"), fam.integer("grid", config.grid_nodes));
  } else if (fam.kind == "gaussian_mean") {
    fam.require_known({"d", "grid", "lift"});
    family = std::make_shared<GaussianMeanFamily>(fam.integer("d"), fam.integer("grid", config.grid_nodes));
  } else if (fam.kind == "rbm" || fam.kind == "rbm_marginal") {
    fam.require_known({"nx", "nh", "param", "lift"});
    p.rbm_nx = fam.integer("nx");
    p.rbm_nh = fam.integer("nh", 1);
    if (fam.kind == "rbm") {
      family = std::make_shared<RbmJointFamily>(p.rbm_nx, p.rbm_nh, rbm_options);
    } else {
      family = std::make_shared<RbmMarginalFamily>(p.rbm_nx, p.rbm_nh, rbm_options);
    }
    const std::string param = fam.text("param", "standard");
    if (param == "centered") {
      p.rbm_chart = rbm_centered_map(p.rbm_nx, p.rbm_nh);
      family = std::make_shared<AffineReparamFamily>(family, *p.rbm_chart,
                                                     Vector::Zero(family->dim_theta()), fam.kind + "_centered");
    } else if (param != "standard") {
      throw InvalidInput("rbm: param must be standard or centered");
    }
  } else {
    throw InvalidInput("unknown family kind '" + fam.kind + "'");
  }
  if (fam.has("lift")) {
    if (fam.values.at("lift") != "uniform") throw InvalidInput("family lift must be 'uniform'");
    family = std::make_shared<NoisyLiftFamily>(family);
  }
  p.family = family;

  p.objective = parse_objective(config.objective);
  if (p.objective->dim() > family->dim_point())
    throw InvalidInput("objective dimension " + std::to_string(p.objective->dim()) +
                       " exceeds the family's point dimension " + std::to_string(family->dim_point()));

  const SpecString sch = SpecString::parse(config.scheme);
  if (sch.kind == "pbil") {
    sch.require_known({"mu"});
    p.pbil_mu = sch.integer("mu", 1);
    if (p.pbil_mu < 1) throw InvalidInput("pbil: mu must be positive");
  } else {
    p.scheme = parse_scheme(config.scheme);
  }
  p.rule = config.quantile_rule == "midpoint" ? QuantileRule::midpoint : QuantileRule::cell_integral;

  const bool gaussian_rule = config.algorithm == "cma" || config.algorithm == "emna" ||
                             config.algorithm == "xnes" || config.algorithm == "unified";
  if (gaussian_rule && !dynamic_cast<const GaussianFamily*>(&unlifted(*family)))
    throw InvalidInput("algorithm '" + config.algorithm + "' needs the gaussian family");
  if ((config.algorithm == "cem" || config.algorithm == "smoothed_cem" || config.algorithm == "emna") &&
      !p.scheme)
    throw InvalidInput("algorithm '" + config.algorithm + "' needs a quantile weight scheme");
  return p;
}

std::uint64_t run_seed(std::uint64_t master, Index run_id) {
  return mix_seed(master, static_cast<std::uint64_t>(run_id));
}

Vector initial_theta(const ExperimentConfig& config, const Problem& problem, std::uint64_t seed) {
  const Family& family = unlifted(*problem.family);
  if (config.theta0) {
    if (config.theta0->size() != problem.family->dim_theta())
      throw InvalidInput("theta0 has the wrong length");
    return *config.theta0;
  }
  auto mean0 = [&](Index d) -> Vector {
    if (!config.mean0) return Vector::Zero(d);
    if (config.mean0->size() != d) throw InvalidInput("mean0 has the wrong length");
    return *config.mean0;
  };
  const double var0 = config.sigma0 * config.sigma0;
  if (const auto* b = dynamic_cast<const BernoulliFamily*>(&family))
    return Vector::Constant(b->dim_theta(), 0.5);
  if (dynamic_cast<const BernoulliLogitFamily*>(&family)) return Vector::Zero(family.dim_theta());
  if (const auto* g = dynamic_cast<const GaussianFamily*>(&family))
    return pack_gaussian({mean0(g->dim()), var0 * Matrix::Identity(g->dim(), g->dim())});
  if (dynamic_cast<const GaussianExpectationFamily*>(&family)) {
    const Index d = family.dim_point();
    return pack_gaussian(gaussian_to_expectation({mean0(d), var0 * Matrix::Identity(d, d)}));
  }
  if (dynamic_cast<const IsotropicGaussianFamily*>(&family)) {
    Vector theta(family.dim_theta());
    theta << mean0(family.dim_point()), std::log(config.sigma0);
    return theta;
  }
  if (dynamic_cast<const GaussianMeanFamily*>(&family)) return mean0(family.dim_point());
  if (problem.rbm_nx > 0) {
    Rng rng = StreamFactory(seed, 0, StreamTag::init).stream(0);
    const Vector standard = pack_rbm(rbm_init(problem.rbm_nx, problem.rbm_nh, rng));
    if (problem.rbm_chart) return problem.rbm_chart->colPivHouseholderQr().solve(standard);
    return standard;
  }
  throw InvalidInput("no default initial parameters for family " + family.name());
}

std::string status_name(RunStatus status) {
  switch (status) {
    case RunStatus::converged: return "converged";
    case RunStatus::both_optima_reached: return "both_optima_reached";
    case RunStatus::failed_singular: return "failed_singular";
    case RunStatus::failed_unreliable: return "failed_unreliable";
    case RunStatus::step_limit: return "step_limit";
  }
  return "unknown";
}

bool is_failure(RunStatus status) {
  return status == RunStatus::failed_singular || status == RunStatus::failed_unreliable;
}

void RunRecord::set_status(RunStatus s) {
  if (status) throw Error("run status set twice");
  status = s;
}

Index ExperimentResult::failures() const {
  return static_cast<Index>(std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) {
    return r.status && is_failure(*r.status);
  }));
}

RunRecord run_single(const ExperimentConfig& config, const Problem& problem, Index run_id, bool keep_thetas) {
  const Family& family = *problem.family;
  const Family& core = unlifted(family);
  const auto* bernoulli = dynamic_cast<const BernoulliFamily*>(&core);
  const auto* gaussian = dynamic_cast<const GaussianFamily*>(&core);
  const Objective& objective = *problem.objective;
  const Vector* two_min = two_min_target(objective);
  const bool joint_rbm = problem.rbm_nx > 0 && family.dim_point() >= problem.rbm_nx + problem.rbm_nh &&
                         core.name().rfind("rbm_marginal", 0) != 0;

  RunRecord rec;
  rec.run_id = run_id;
  rec.seed = run_seed(config.seed, run_id);
  rec.weight_variance = weight_variance(problem);
  Vector theta = initial_theta(config, problem, rec.seed);
  family.validate(theta);

  const Index n = config.samples;
  const double q_report = report_quantile(problem);
  const double eta_m_cfg = config.eta_m;
  const double eta_c_cfg = config.eta_c;
  const WeightSumPolicy policy = config.weight_sum == "renormalize" ? WeightSumPolicy::renormalize
                                 : config.weight_sum == "general"   ? WeightSumPolicy::general
                                                                    : WeightSumPolicy::strict;
  const Coordinates coords = config.smoothing == "native" ? Coordinates::native : Coordinates::expectation;
  const ReliabilityCriterion criterion = config.reliability_log_symmetric ? ReliabilityCriterion::log_symmetric
                                                                          : ReliabilityCriterion::mean_eigenvalue;
  const double beta = default_adapt_beta(n, family.dim_theta());
  std::optional<XnesState> xnes;
  if (config.algorithm == "xnes") {
    const GaussianParams g = unpack_gaussian(theta, gaussian->dim());
    xnes = XnesState{g.mean, Eigen::LLT<Matrix>(g.cov).matrixL()};
  }

  bool seen_y = false, seen_ybar = false;
  double dt = config.dt;
  std::optional<Vector> previous_step;
  std::vector<double> values(static_cast<std::size_t>(n));

  for (Index k = 0; k < config.steps; ++k) {
    if (keep_thetas) rec.thetas.push_back(theta);
    const StreamFactory update_streams(rec.seed, static_cast<std::uint64_t>(k), StreamTag::update);
    const StreamFactory noise_streams = update_streams.with_tag(StreamTag::noise);
    Samples x = family.sample(theta, n, update_streams);

    for (Index i = 0; i < n; ++i) {
      Rng noise = noise_streams.stream(static_cast<std::uint64_t>(i));
      const Vector point = x.col(i).head(objective.dim());
      const double f = objective(point, &noise);
      if (!std::isfinite(f)) throw InvalidInput("objective returned a non-finite value");
      values[static_cast<std::size_t>(i)] = f;
    }

    RunRow row;
    row.run_id = run_id;
    row.step = k;
    row.time = static_cast<double>(k) * config.dt;
    row.dt = dt;
    row.best_f = *std::min_element(values.begin(), values.end());
    row.quantile_f = distribution_quantile(Eigen::Map<const Vector>(values.data(), n),
                                           Vector::Constant(n, 1.0), q_report);
    row.dist_second = kNaN;
    row.mean_h = kNaN;
    row.kl = kNaN;
    row.kl_se = kNaN;
    row.speed = kNaN;
    row.reliability = "none";
    if (two_min) {
      const Vector ybar = (1.0 - two_min->array()).matrix();
      Index dy = objective.dim(), dybar = objective.dim();
      for (Index i = 0; i < n; ++i) {
        const Vector point = x.col(i).head(objective.dim());
        dy = std::min(dy, hamming(point, *two_min));
        dybar = std::min(dybar, hamming(point, ybar));
      }
      row.dist_second = static_cast<double>(std::max(dy, dybar));
      seen_y = seen_y || dy == 0;
      seen_ybar = seen_ybar || dybar == 0;
      if (seen_y && seen_ybar && rec.both_optima_step < 0) rec.both_optima_step = k;
    }
    if (joint_rbm) row.mean_h = x.middleRows(problem.rbm_nx, problem.rbm_nh).mean();

    if (config.stop == "both_optima" && rec.both_optima_step >= 0) {
      rec.rows.push_back(row);
      rec.set_status(RunStatus::both_optima_reached);
      break;
    }
    if (config.stop == "target" && row.best_f <= config.target) {
      rec.rows.push_back(row);
      rec.set_status(RunStatus::converged);
      break;
    }

    try {
      const RankedWeights w = batch_weights(problem, values, dt);
      const bool natural = config.algorithm == "igo";
      // Fisher matrix: used by the natural-gradient update and for the speed diagnostic.
      std::optional<FisherMatrix> fisher;
      if (config.fisher == "mc" && natural) {
        fisher = mc_fisher(family, theta, config.fisher_samples, update_streams.with_tag(StreamTag::fisher_a));
        if (config.reliability) {
          const FisherMatrix second =
              mc_fisher(family, theta, config.fisher_samples, update_streams.with_tag(StreamTag::fisher_b));
          const ReliabilityResult r = reliability_check(*fisher, second, criterion);
          row.reliability = r.pass ? "pass" : "fail";
          if (!r.pass) {
            rec.rows.push_back(row);
            rec.failure = r.singular ? "second Fisher estimate is singular"
                                     : "mean eigenvalue " + std::to_string(r.mean_eigenvalue);
            rec.set_status(RunStatus::failed_unreliable);
            break;
          }
        }
      } else if (family.capabilities().exact_fisher || family.capabilities().enumerable) {
        try {
          fisher = exact_fisher(family, theta);
          row.reliability = "exact";
        } catch (const CapabilityError&) {
          if (natural) throw;
        }
      }
      if (natural && !fisher) throw CapabilityError(family.name() + ": no Fisher matrix for the update");

      const double eta_m = eta_m_cfg > 0.0 ? eta_m_cfg : dt;
      const double eta_c = eta_c_cfg > 0.0 ? eta_c_cfg : dt;
      Vector next;
      if (config.algorithm == "igo") {
        if (bernoulli) {
          const std::vector<Index> order = rank_order(values);
          Samples ranked(bernoulli->dim_point(), n);
          std::vector<double> ranked_w(static_cast<std::size_t>(n));
          for (Index j = 0; j < n; ++j) {
            const Index idx = order[static_cast<std::size_t>(j)];
            ranked.col(j) = x.col(idx).head(bernoulli->dim_point());
            ranked_w[static_cast<std::size_t>(j)] = w.weights(idx);
          }
          next = bernoulli_igo_update(theta, ranked, ranked_w, dt, bernoulli->clamp_epsilon());
        } else {
          next = igo_step(family, theta, x, w, dt, *fisher, config.ridge);
        }
      } else if (config.algorithm == "vanilla_gradient") {
        next = vanilla_step(family, theta, x, w, dt);
      } else if (config.algorithm == "igo_ml") {
        next = igo_ml_step(family, theta, x, w, dt, policy);
      } else if (config.algorithm == "cem") {
        next = cem_step(family, x, values, problem.scheme->selection_quantile());
      } else if (config.algorithm == "smoothed_cem") {
        next = smoothed_cem_step(family, theta, x, w, dt, coords);
      } else {
        const GaussianParams g = unpack_gaussian(theta, gaussian->dim());
        const Samples pts = x.topRows(gaussian->dim());
        if (config.algorithm == "cma") {
          next = pack_gaussian(cma_update(g, pts, w.weights, eta_m, eta_c));
        } else if (config.algorithm == "emna") {
          next = pack_gaussian(emna_update(pts, w.weights));
        } else if (config.algorithm == "xnes") {
          *xnes = xnes_update(*xnes, pts, w.weights, eta_m, eta_c);
          next = pack_gaussian({xnes->mean, xnes->cov()});
        } else {
          next = pack_gaussian(unified_update(g, elite_statistics(pts, w.weights), dt, config.ladder_j));
        }
      }
      next = family.project(next);
      if (!next.allFinite()) throw DegenerateUpdate("update produced non-finite parameters");
      try {
        family.validate(next);
      } catch (const DomainError& e) {
        throw DegenerateUpdate(std::string("update left the parameter domain: ") + e.what());
      }

      const Vector step = next - theta;
      if (fisher) {
        const StepReport report = step_diagnostics(family, fisher->matrix, theta, next,
                                                   config.kl ? x : Samples(x.rows(), 0), previous_step);
        row.speed = report.fisher_step_norm / dt;
        if (config.kl) {
          row.kl = report.kl_estimate;
          row.kl_se = report.kl_standard_error;
        }
        if (config.adapt_dt)
          dt = adapt_dt(report, dt, beta, config.adapt_rule == "sign" ? AdaptRule::sign : AdaptRule::cosine);
      } else if (config.kl) {
        const KlEstimate kl = estimate_kl(family, theta, next, x);
        row.kl = kl.value;
        row.kl_se = kl.standard_error;
      }
      previous_step = step;
      theta = next;
      rec.rows.push_back(row);
    } catch (const SingularFisher& e) {
      rec.rows.push_back(row);
      rec.failure = e.what();
      rec.set_status(RunStatus::failed_singular);
      break;
    } catch (const DegenerateUpdate& e) {
      rec.rows.push_back(row);
      rec.failure = e.what();
      rec.set_status(RunStatus::failed_singular);
      break;
    }
  }
  if (!rec.status) rec.set_status(RunStatus::step_limit);
  rec.final_theta = theta;
  if (keep_thetas) rec.thetas.push_back(theta);
  return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool keep_thetas) {
  validate_config(config);
  const Problem problem = build_problem(config);
  ExperimentResult result;
  result.config = config;
  result.runs.resize(static_cast<std::size_t>(config.repeats));
  Index workers = config.threads > 0 ? config.threads : static_cast<Index>(std::thread::hardware_concurrency());
  workers = std::clamp<Index>(workers, 1, config.repeats);
  std::atomic<Index> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto work = [&] {
    for (Index r = next++; r < config.repeats; r = next++) {
      try {
        result.runs[static_cast<std::size_t>(r)] = run_single(config, problem, r, keep_thetas);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (Index t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return result;
}

FlowResult run_flow(const ExperimentConfig& config) {
  validate_config(config);
  const Problem problem = build_problem(config);
  if (!problem.scheme) throw InvalidInput("flow: needs a quantile weight scheme");
  const Family& family = *problem.family;
  const Objective& objective = *problem.objective;
  const WeightScheme scheme = *problem.scheme;
  const auto* bernoulli = dynamic_cast<const BernoulliFamily*>(&family);
  const FlowField rhs = [&](const Vector& theta) -> Vector {
    if (bernoulli) return bernoulli_flow_rhs(theta, objective, scheme);
    return flow_rhs(family, theta, objective, scheme);
  };
  const Vector theta0 = initial_theta(config, problem, run_seed(config.seed, 0));
  const auto project = [&](const Vector& theta) { return family.project(theta); };
  const std::vector<FlowState> states =
      integrate(rhs, theta0, config.horizon, config.flow_step,
                config.integrator == "euler" ? Integrator::euler : Integrator::rk4, project);

  const QuantileMode mode =
      config.quantile_mode == "interpolated" ? QuantileMode::interpolated : QuantileMode::midpoint;
  const double q = report_quantile(problem);
  FlowResult result;
  result.config = config;
  const Index total = static_cast<Index>(states.size()) - 1;
  const Index marks = config.checkpoints > 0 ? std::min(config.checkpoints, total) : total;
  Index last = -1;
  for (Index c = 0; c <= marks; ++c) {
    const Index k = marks == 0 ? 0 : c * total / marks;
    if (k == last) continue;
    last = k;
    const FlowState& state = states[static_cast<std::size_t>(k)];
    const Support support = family.support(state.theta);
    Vector f(support.points.cols());
    for (Index i = 0; i < f.size(); ++i) f(i) = objective(support.points.col(i).head(objective.dim()));
    const Vector p = support.probabilities / support.probabilities.sum();
    result.points.push_back({state.t, state.theta, distribution_quantile(f, p, q, mode), p.dot(f)});
  }
  return result;
}

void write_flow_csv(std::ostream& out, const FlowResult& result) {
  out << "# igo-csv v1 flow name=" << result.config.name << "\n";
  out << "t,quantile_f,mean_f";
  const Index p = result.points.empty() ? 0 : result.points.front().theta.size();
  for (Index i = 0; i < p; ++i) out << ",theta_" << i;
  out << '\n';
  for (const FlowPoint& pt : result.points) {
    out << format_number(pt.t) << ',' << format_number(pt.quantile_f) << ',' << format_number(pt.mean_f);
    for (Index i = 0; i < pt.theta.size(); ++i) out << ',' << format_number(pt.theta(i));
    out << '\n';
  }
}

double percentile(std::vector<double> values, double p) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_runs_csv(std::ostream& out, const ExperimentResult& result) {
  out << "# igo-csv v1 runs name=" << result.config.name << "\n";
  out << "run_id,step,t,dt,best_f,quantile_f,dist_second,mean_h,kl,kl_se,speed,reliability\n";
  for (const RunRecord& run : result.runs)
    for (const RunRow& r : run.rows)
      out << r.run_id << ',' << r.step << ',' << format_number(r.time) << ',' << format_number(r.dt) << ','
          << format_number(r.best_f) << ',' << format_number(r.quantile_f) << ','
          << format_number(r.dist_second) << ',' << format_number(r.mean_h) << ',' << format_number(r.kl)
          << ',' << format_number(r.kl_se) << ',' << format_number(r.speed) << ',' << r.reliability << '\n';
}

void write_summary_csv(std::ostream& out, const ExperimentResult& result) {
  out << "# igo-csv v1 summary name=" << result.config.name << " percentiles=16,50,84\n";
  out << "step,t,runs";
  const char* metrics[] = {"best_f", "quantile_f", "dist_second", "mean_h", "kl", "speed"};
  for (const char* m : metrics) out << ',' << m << "_p16," << m << "_p50," << m << "_p84";
  out << '\n';
  Index max_steps = 0;
  for (const RunRecord& run : result.runs) max_steps = std::max<Index>(max_steps, static_cast<Index>(run.rows.size()));
  for (Index k = 0; k < max_steps; ++k) {
    std::vector<std::vector<double>> cols(6);
    for (const RunRecord& run : result.runs) {
      if (k >= static_cast<Index>(run.rows.size())) continue;
      const RunRow& r = run.rows[static_cast<std::size_t>(k)];
      const double v[] = {r.best_f, r.quantile_f, r.dist_second, r.mean_h, r.kl, r.speed};
      for (std::size_t m = 0; m < 6; ++m) cols[m].push_back(v[m]);
    }
    out << k << ',' << format_number(static_cast<double>(k) * result.config.dt) << ',' << cols[0].size();
    for (const auto& c : cols)
      out << ',' << format_number(percentile(c, 16)) << ',' << format_number(percentile(c, 50)) << ','
          << format_number(percentile(c, 84));
    out << '\n';
  }
}

void write_status_csv(std::ostream& out, const ExperimentResult& result) {
  out << "# igo-csv v1 status name=" << result.config.name << " max_condition=1e12\n";
  out << "run_id,seed,status,steps,both_optima_step,failure\n";
  for (const RunRecord& run : result.runs) {
    std::string failure = run.failure;
    std::replace(failure.begin(), failure.end(), ',', ';');
    out << run.run_id << ',' << run.seed << ',' << status_name(*run.status) << ',' << run.rows.size() << ','
        << run.both_optima_step << ',' << failure << '\n';
  }
}

std::vector<std::string> write_outputs(const ExperimentResult& result, const std::string& directory) {
  std::filesystem::create_directories(directory);
  const std::string base = (std::filesystem::path(directory) / result.config.name).string();
  std::vector<std::string> paths{base + "_runs.csv", base + "_summary.csv", base + "_status.csv"};
  std::ofstream runs(paths[0]), summary(paths[1]), status(paths[2]);
  if (!runs || !summary || !status) throw Error("cannot write output files under " + directory);
  write_runs_csv(runs, result);
  write_summary_csv(summary, result);
  write_status_csv(status, result);
  return paths;
}

}  // namespace igo
