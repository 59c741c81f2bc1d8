// SPDX-License-Identifier: Apache-2.0
//
// rpoint: command-line harness for branching-random-walk scaling checks.
//
//   rpoint <simulate|moments|survival|fdd|identity|csbm|report>
//          [--config FILE] [--seed U64] [--threads N] [--out DIR]
//
// Exit codes: 0 every row passed, 1 some row failed, 2 configuration error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rpoint/config.hpp"
#include "rpoint/error.hpp"
#include "rpoint/experiment.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string subcommand;
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
};

rpoint::ExperimentConfig resolve_config(const Options& opts) {
  rpoint::ExperimentConfig config;
  if (opts.config) {
    config = rpoint::load_config(*opts.config);
  } else if (opts.subcommand != "csbm") {
    throw rpoint::ConfigError("--config is required for '" + opts.subcommand + "'");
  }
  if (opts.subcommand == "csbm" && !opts.config) config.kind = rpoint::ExperimentKind::CsbmTable;
  if (opts.subcommand != "report" && opts.subcommand != "simulate") {
    const auto wanted = opts.subcommand == "csbm" ? rpoint::ExperimentKind::CsbmTable
                                                  : rpoint::parse_experiment_kind(opts.subcommand);
    if (config.kind != wanted) {
      throw rpoint::ConfigError("config kind '" + std::string(rpoint::to_string(config.kind)) +
                                "' does not match subcommand '" + opts.subcommand + "'");
    }
  }
  if (opts.seed) config.seed = *opts.seed;
  if (opts.threads) config.threads = *opts.threads;
  if (opts.out) config.output = *opts.out;
  config.validate();
  return config;
}

int run_simulate(const rpoint::ExperimentConfig& config) {
  if (config.kind == rpoint::ExperimentKind::CsbmTable || config.n_grid.empty()) {
    throw rpoint::ConfigError("simulate needs a model, n_grid, replicates and horizon_time");
  }
  const auto model = std::make_shared<const rpoint::Model>(config.model.build());
  const std::uint32_t n = config.n_grid.front();
  const auto variants = rpoint::convention_variants(*model, n, config.convention);
  const rpoint::Ensemble ensemble(model, variants.front().constants, config.replicates,
                                  config.horizon_time, config.seed, config.threads);
  if (config.output) {
    std::filesystem::create_directories(*config.output);
    const auto file = *config.output / "paths.jsonl";
    std::ofstream out(file, std::ios::binary);
    if (!out) throw rpoint::Error("cannot write " + file.string());
    rpoint::dump_paths(out, ensemble, config.replicates);
    std::cout << "wrote " << config.replicates << " paths to " << file.string() << '\n';
  } else {
    rpoint::dump_paths(std::cout, ensemble, config.replicates);
  }
  return kExitPass;
}

int run(const Options& opts) {
  const rpoint::ExperimentConfig config = resolve_config(opts);
  if (opts.subcommand == "simulate") return run_simulate(config);

  const rpoint::Report report = rpoint::convergence_table(config);
  if (config.output) rpoint::write_report_files(report, *config.output);
  rpoint::write_summary(std::cout, report);
  return report.all_pass() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scaling-limit verification harness for critical branching random walk"};
  app.require_subcommand(1, 1);

  Options opts;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "Dump rescaled replicate paths as JSON lines"},
      {"moments", "Fourier moment convergence against the canonical measure"},
      {"survival", "Survival weights mu_n(S > eps) against 2/eps"},
      {"fdd", "Conditional mass law, weighted and truncated functionals"},
      {"identity", "r-point Fourier identity on shared realizations"},
      {"csbm", "Exact canonical-measure table (no simulation)"},
      {"report", "Run whatever experiment the config describes"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "Experiment config (JSON)");
    sub->add_option("--seed", opts.seed, "Master seed override");
    sub->add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", opts.out, "Output directory");
    sub->callback([&opts, sub] { opts.subcommand = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    return run(opts);
  } catch (const rpoint::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rpoint::HorizonError& e) {
    std::cerr << "config error (horizon): " << e.what() << '\n';
    return kExitConfig;
  } catch (const rpoint::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
