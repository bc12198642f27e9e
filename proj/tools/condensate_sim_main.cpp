// Command line driver: one subcommand per experiment kind, a JSON config
// for everything else. Exit codes: 0 success, 1 bad config or usage,
// 2 verification failure, 3 runtime error.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "condensate/errors.hpp"
#include "condensate/harness.hpp"

namespace {

struct CliArgs {
  std::string config;
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int replicas = 0;
  bool replicas_given = false;
};

void add_common_flags(CLI::App* cmd, CliArgs* args) {
  cmd->add_option("--config", args->config, "experiment config (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args->seed, "master seed override")
      ->each([args](const std::string&) { args->seed_given = true; });
  cmd->add_option("--replicas", args->replicas, "replica count override")
      ->check(CLI::PositiveNumber)
      ->each([args](const std::string&) { args->replicas_given = true; });
  cmd->add_option("--out", args->out, "output directory");
  cmd->add_option("--format", args->format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and verification driver for mean-field "
               "condensation dynamics"};
  app.require_subcommand(1);

  const struct {
    const char* name;
    const char* kind;
    const char* help;
  } subs[] = {
      {"simulate-ip", "ip-sim", "run the particle system and average replicas"},
      {"solve-ode", "ode", "integrate the slow-profile flow"},
      {"simulate-wf", "wf", "Monte Carlo moments of the cluster diffusion"},
      {"sample-pd", "pd-sample", "stick-breaking sampler moment check"},
      {"moments", "moments", "integrate the closed moment hierarchy"},
      {"verify", "verify", "run the full verification suite"},
      {"figure2", "figure2", "condensate growth curves from four starts"},
  };

  CliArgs args;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common_flags(cmd, &args);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    condensate::ExperimentConfig cfg;
    if (!args.config.empty()) {
      cfg = condensate::ExperimentConfig::load(args.config);
    }
    for (const auto& s : subs) {
      if (app.got_subcommand(s.name)) cfg.kind = s.kind;
    }
    if (args.seed_given) cfg.master_seed = args.seed;
    if (args.replicas_given) cfg.replicas = args.replicas;
    if (!args.out.empty()) {
      cfg.out_dir = args.out;
    } else if (cfg.kind == "verify" && args.config.empty()) {
      cfg.out_dir = "acceptance_out";
    }
    if (!args.format.empty()) cfg.format = args.format;

    const condensate::RunResult res = condensate::run_experiment(cfg);
    std::cout << res.summary.dump(2) << "\n";
    for (const std::string& f : res.files) {
      std::cout << "wrote " << f << "\n";
    }
    return res.exit_code;
  } catch (const condensate::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
