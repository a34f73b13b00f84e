#include "igo/cli/config.hpp"

#include <fstream>
#include <limits>
#include <functional>
#include <map>
#include <sstream>

#include "igo/cli/experiment.hpp"
#include "igo/core/spec_string.hpp"

namespace igo {

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InvalidInput(key + ": expected a boolean, got '" + v + "'");
}

std::uint64_t parse_seed(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v.c_str(), &end, 0);
  if (v.empty() || end != v.c_str() + v.size()) throw InvalidInput(key + ": bad seed '" + v + "'");
  return s;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto text = [](std::string ExperimentConfig::*field) {
      return [field](ExperimentConfig& c, const std::string& v, const std::string&) { c.*field = v; };
    };
    auto real = [](double ExperimentConfig::*field) {
      return [field](ExperimentConfig& c, const std::string& v, const std::string& k) {
        c.*field = parse_real(v, k);
      };
    };
    auto integer = [](Index ExperimentConfig::*field) {
      return [field](ExperimentConfig& c, const std::string& v, const std::string& k) {
        c.*field = parse_integer(v, k);
      };
    };
    auto flag = [](bool ExperimentConfig::*field) {
      return [field](ExperimentConfig& c, const std::string& v, const std::string& k) {
        c.*field = parse_bool(v, k);
      };
    };
    t["name"] = text(&ExperimentConfig::name);
    t["family"] = text(&ExperimentConfig::family);
    t["objective"] = text(&ExperimentConfig::objective);
    t["scheme"] = text(&ExperimentConfig::scheme);
    t["quantile_rule"] = text(&ExperimentConfig::quantile_rule);
    t["algorithm"] = text(&ExperimentConfig::algorithm);
    t["samples"] = integer(&ExperimentConfig::samples);
    t["dt"] = real(&ExperimentConfig::dt);
    t["steps"] = integer(&ExperimentConfig::steps);
    t["repeats"] = integer(&ExperimentConfig::repeats);
    t["seed"] = [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.seed = parse_seed(v, k); };
    t["fisher"] = [](ExperimentConfig& c, const std::string& v, const std::string& k) {
      // Accepts `exact`, `mc`, or `mc(M)` as shorthand for fisher_samples = M.
      if (v.size() > 4 && v.rfind("mc(", 0) == 0 && v.back() == ')') {
        c.fisher = "mc";
        c.fisher_samples = parse_integer(v.substr(3, v.size() - 4), k);
      } else {
        c.fisher = v;
      }
    };
    t["fisher_samples"] = integer(&ExperimentConfig::fisher_samples);
    t["reliability"] = flag(&ExperimentConfig::reliability);
    t["reliability_log_symmetric"] = flag(&ExperimentConfig::reliability_log_symmetric);
    t["ridge"] = [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.ridge = parse_real(v, k); };
    t["weight_sum"] = text(&ExperimentConfig::weight_sum);
    t["smoothing"] = text(&ExperimentConfig::smoothing);
    t["eta_m"] = real(&ExperimentConfig::eta_m);
    t["eta_c"] = real(&ExperimentConfig::eta_c);
    t["ladder_j"] = [](ExperimentConfig& c, const std::string& v, const std::string& k) {
      c.ladder_j = (v == "inf" || v == "infinity") ? std::numeric_limits<double>::infinity() : parse_real(v, k);
    };
    t["theta0"] = [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.theta0 = parse_real_list(v, k); };
    t["mean0"] = [](ExperimentConfig& c, const std::string& v, const std::string& k) { c.mean0 = parse_real_list(v, k); };
    t["sigma0"] = real(&ExperimentConfig::sigma0);
    t["stop"] = text(&ExperimentConfig::stop);
    t["target"] = real(&ExperimentConfig::target);
    t["kl"] = flag(&ExperimentConfig::kl);
    t["adapt_dt"] = flag(&ExperimentConfig::adapt_dt);
    t["adapt_rule"] = text(&ExperimentConfig::adapt_rule);
    t["rbm_sampler"] = text(&ExperimentConfig::rbm_sampler);
    t["gibbs_burn_in"] = integer(&ExperimentConfig::gibbs_burn_in);
    t["threads"] = integer(&ExperimentConfig::threads);
    t["paper_scale"] = flag(&ExperimentConfig::paper_scale);
    t["horizon"] = real(&ExperimentConfig::horizon);
    t["flow_step"] = real(&ExperimentConfig::flow_step);
    t["integrator"] = text(&ExperimentConfig::integrator);
    t["checkpoints"] = integer(&ExperimentConfig::checkpoints);
    t["grid_nodes"] = integer(&ExperimentConfig::grid_nodes);
    t["quantile_mode"] = text(&ExperimentConfig::quantile_mode);
    return t;
  }();
  return table;
}

void require_one_of(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return;
  throw InvalidInput(key + ": unsupported value '" + value + "'");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int number = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("line " + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw InvalidInput("line " + std::to_string(number) + ": unknown key '" + key + "'");
    if (seen.count(key))
      throw InvalidInput("line " + std::to_string(number) + ": duplicate key '" + key + "' (first on line " +
                         std::to_string(seen[key]) + ")");
    seen[key] = number;
    try {
      it->second(c, value, key);
    } catch (const InvalidInput& e) {
      throw InvalidInput("line " + std::to_string(number) + ": " + e.what());
    }
  }
  if (c.paper_scale) c = with_paper_scale(c);
  validate_config(c);
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  return parse_config(in);
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

void validate_config(const ExperimentConfig& c) {
  if (c.samples < 1) throw InvalidInput("samples must be positive");
  if (c.steps < 0) throw InvalidInput("steps must be non-negative");
  if (c.repeats < 1) throw InvalidInput("repeats must be positive");
  if (!(c.dt > 0.0)) throw InvalidInput("dt must be positive");
  if (c.fisher_samples < 1) throw InvalidInput("fisher_samples must be positive");
  if (!(c.sigma0 > 0.0)) throw InvalidInput("sigma0 must be positive");
  if (c.threads < 0) throw InvalidInput("threads must be non-negative");
  if (c.gibbs_burn_in < 0) throw InvalidInput("gibbs_burn_in must be non-negative");
  if (!(c.flow_step > 0.0)) throw InvalidInput("flow_step must be positive");
  if (!(c.horizon >= 0.0)) throw InvalidInput("horizon must be non-negative");
  if (c.ridge && !(*c.ridge > 0.0)) throw InvalidInput("ridge must be positive");
  require_one_of("algorithm", c.algorithm,
                 {"igo", "igo_ml", "cem", "smoothed_cem", "cma", "emna", "xnes", "unified", "vanilla_gradient"});
  require_one_of("fisher", c.fisher, {"exact", "mc"});
  require_one_of("quantile_rule", c.quantile_rule, {"cell_integral", "midpoint"});
  require_one_of("weight_sum", c.weight_sum, {"strict", "renormalize", "general"});
  require_one_of("smoothing", c.smoothing, {"native", "expectation"});
  require_one_of("stop", c.stop, {"none", "both_optima", "target"});
  require_one_of("adapt_rule", c.adapt_rule, {"cosine", "sign"});
  require_one_of("rbm_sampler", c.rbm_sampler, {"exact", "gibbs"});
  require_one_of("integrator", c.integrator, {"euler", "rk4"});
  require_one_of("quantile_mode", c.quantile_mode, {"midpoint", "interpolated"});
  // Building the problem parses every spec string.
  build_problem(c);
}

ExperimentConfig with_paper_scale(ExperimentConfig c) {
  SpecString fam = SpecString::parse(c.family);
  if (fam.kind == "rbm" || fam.kind == "rbm_marginal") fam.values["nx"] = "40";
  std::string family = fam.kind + ":";
  for (const auto& [k, v] : fam.values) family += k + "=" + v + ";";
  c.family = family;
  SpecString obj = SpecString::parse(c.objective);
  if (obj.kind == "two_min" && !obj.has("y")) obj.values["d"] = "40";
  std::string objective = obj.kind + ":";
  for (const auto& [k, v] : obj.values) objective += k + "=" + v + ";";
  c.objective = objective;
  c.samples = 10000;
  c.repeats = 100;
  c.paper_scale = true;
  return c;
}

}  // namespace igo
