// Command-line front end: run, flow, table and selftest subcommands.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "igo/cli/config.hpp"
#include "igo/cli/experiment.hpp"
#include "igo/cli/tables.hpp"
#include "igo/families/rbm.hpp"
#include "igo/flow/flow.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitFailedRuns = 3;

std::string output_dir() {
  const char* dir = std::getenv("IGO_OUTPUT_DIR");
  return dir && *dir ? dir : ".";
}

igo::ExperimentConfig load(const std::string& path) {
  igo::ExperimentConfig config = igo::parse_config_file(path);
  if (config.paper_scale) config = igo::with_paper_scale(config);
  igo::validate_config(config);
  return config;
}

int cmd_run(const std::string& path) {
  const igo::ExperimentConfig config = load(path);
  const igo::ExperimentResult result = igo::run_experiment(config);
  for (const std::string& file : igo::write_outputs(result, output_dir())) std::cout << file << '\n';
  const igo::Index failed = result.failures();
  if (failed > 0) {
    igo::Index singular = 0;
    for (const auto& run : result.runs) singular += *run.status == igo::RunStatus::failed_singular;
    std::cerr << failed << " of " << result.runs.size() << " runs failed (" << singular << " singular, "
              << failed - singular << " unreliable Fisher)\n";
    return kExitFailedRuns;
  }
  return kExitOk;
}

int cmd_flow(const std::string& path) {
  const igo::ExperimentConfig config = load(path);
  const igo::FlowResult result = igo::run_flow(config);
  const std::string dir = output_dir();
  std::filesystem::create_directories(dir);
  const std::string file = (std::filesystem::path(dir) / (config.name + "_flow.csv")).string();
  std::ofstream out(file);
  if (!out) throw igo::Error("cannot write " + file);
  igo::write_flow_csv(out, result);
  std::cout << file << '\n';
  return kExitOk;
}

int cmd_selftest() {
  int failed = 0;
  auto check = [&](const char* what, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << what << '\n';
    failed += !ok;
  };
  check("critical dt at q = 0.25", std::abs(igo::critical_dt(0.25, 1.0) - 0.5306320605) < 1e-9);
  {
    igo::RbmParams p{igo::Vector::Zero(1), igo::Vector::Zero(1), igo::Matrix::Ones(1, 1)};
    check("rbm partition function 3 + e", std::abs(std::exp(igo::rbm_log_partition(p)) - (3.0 + std::exp(1.0))) < 1e-12);
  }
  {
    igo::ExperimentConfig c = igo::parse_config_string(
        "family = bernoulli:d=10\nobjective = onemax:d=10\nscheme = pbil:mu=1\nsamples = 20\nsteps = 30\n");
    std::ostringstream a, b;
    igo::write_runs_csv(a, igo::run_experiment(c));
    c.threads = 2;
    c.repeats = 1;
    igo::write_runs_csv(b, igo::run_experiment(c));
    check("seeded runs are reproducible", a.str() == b.str());
  }
  return failed == 0 ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-geometric optimization experiments"};
  app.require_subcommand(1);
  std::string config_path;
  std::string table_spec;
  auto* run = app.add_subcommand("run", "Run a configured experiment and write CSV files");
  run->add_option("config", config_path, "Configuration file")->required();
  auto* flow = app.add_subcommand("flow", "Integrate the exact flow of a configured problem");
  flow->add_option("config", config_path, "Configuration file")->required();
  auto* table = app.add_subcommand("table", "Print a table (critical_dt or linear_constants:d=...)");
  table->add_option("spec", table_spec, "Table spec")->required();
  auto* selftest = app.add_subcommand("selftest", "Quick internal consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*flow) return cmd_flow(config_path);
    if (*table) {
      igo::write_table(std::cout, table_spec);
      return kExitOk;
    }
    if (*selftest) return cmd_selftest();
  } catch (const igo::InvalidInput& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const igo::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
