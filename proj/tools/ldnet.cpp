#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"

int main(int argc, char** argv) {
  using ldnet::cli::ExperimentSpec;

  CLI::App app{"Large-deviations rate bounds for distributed inference over random networks"};
  app.footer(ldnet::cli::csvColumnHelp() +
             "\nExit codes: 0 success, 1 validation failure, 2 config or IO error.");
  app.require_subcommand(1);

  ExperimentSpec spec;
  std::uint64_t seed = 0;
  std::int64_t trajectories = 0;
  int horizon = 0;

  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"rate-of-consensus", "Rate of consensus J, optimal cut and p_H*"},
      {"rate-bounds", "Rate curves, I*/I_iH inaccuracy rates and the sandwich check"},
      {"simulate", "Monte Carlo tail rates of consensus+innovations against the bounds"},
      {"social-learning", "Belief dynamics, log-ratio equivalence and belief rate functions"},
      {"envelope-dump", "Dump one envelope curve (optionally with the biconjugate oracle)"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", spec.configPath, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", spec.outDir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--trajectories", trajectories, "Override the Monte Carlo count")->check(CLI::PositiveNumber);
    sub->add_option("--horizon", horizon, "Override the horizon")->check(CLI::PositiveNumber);
    sub->add_option("--set", spec.overrides, "Override a top-level config key (key=value)");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ldnet::cli::kExitConfig;
  }

  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    spec.command = sub->get_name();
    if (sub->count("--seed")) spec.seed = seed;
    if (sub->count("--trajectories")) spec.trajectories = trajectories;
    if (sub->count("--horizon")) spec.horizon = horizon;
  }
  return ldnet::cli::runCommand(spec, std::cout, std::cerr);
}
