#include <iostream>

#include <CLI11.hpp>

#include "admpriors/cli.hpp"
#include "admpriors/error.hpp"

using namespace admpriors;

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic risk, admissibility and prior construction tools"};
  app.require_subcommand(1);

  std::string config_path;
  cli::Overrides overrides;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
  double residual_tol = 0.0;

  struct Command {
    const char* name;
    const char* help;
    cli::CommandResult (*run)(const cli::RunConfig&);
  };
  const Command commands[] = {
      {"risk-map", "Evaluate the asymptotic risk of a prior on a grid", cli::run_risk_map},
      {"check", "Classify a prior-covariance product as admissible or not", cli::run_check},
      {"mixture", "Mixture information, covariance and confidence ellipses", cli::run_mixture},
      {"beat-uniform", "Solve for a prior that beats the uniform and report its gains", cli::run_beat_uniform},
      {"fk", "Feynman-Kac path estimate of the square-root prior", cli::run_fk},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--threads", threads, "Worker threads (0: ADMPRIORS_THREADS or 1)")->check(CLI::NonNegativeNumber);
    sub->add_option("--residual-tol", residual_tol, "Relaxation residual tolerance")->check(CLI::PositiveNumber);
    subs.emplace_back(sub, &c);
  }
  CLI::App* schema = app.add_subcommand("schema", "Print the run configuration schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? cli::kExitOk : cli::kExitError;
  }

  if (schema->parsed()) {
    std::cout << cli::run_config_schema().dump(2) << '\n';
    return cli::kExitOk;
  }
  for (const auto& [sub, command] : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--out")) overrides.out = out;
    if (sub->count("--seed")) overrides.seed = seed;
    if (sub->count("--threads")) overrides.threads = threads;
    if (sub->count("--residual-tol")) overrides.residual_tol = residual_tol;
    try {
      const cli::RunConfig cfg = cli::load_config_file(config_path, overrides);
      const cli::CommandResult result = command->run(cfg);
      std::cout << result.summary.dump(2) << '\n';
      for (const auto& p : result.outputs) std::cerr << "wrote " << p.string() << '\n';
      return result.exit_code;
    } catch (const Error& e) {
      std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
      return cli::kExitError;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return cli::kExitError;
    }
  }
  return cli::kExitError;
}
