#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "app/commands.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"iedd: integral-equation domain-decomposition EM solver"};
  cli.require_subcommand(1);
  std::string config;

  auto* solve = cli.add_subcommand("solve", "Solve one model and export fields, receivers and history");
  solve->add_option("config", config, "JSON configuration file")->required();
  auto* compare = cli.add_subcommand("compare", "Run every listed scheme and write a comparison table");
  compare->add_option("config", config, "JSON configuration file")->required();
  auto* logsim = cli.add_subcommand("logsim", "Simulate a logging run along a trajectory");
  logsim->add_option("config", config, "JSON configuration file")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : iedd::app::kConfigError;
  }

  if (solve->parsed()) return iedd::app::cmd_solve(config, std::cerr);
  if (compare->parsed()) return iedd::app::cmd_compare(config, std::cerr);
  return iedd::app::cmd_logsim(config, std::cerr);
}
