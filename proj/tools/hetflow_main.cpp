#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hetflow/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = hetflow::cli;
  CLI::App app{"Semilinear parabolic flows on truncated grids: spectra, equilibria, connections"};
  app.set_version_flag("--version", std::string(cli::version()));
  app.require_subcommand(1, 1);

  cli::Invocation inv;
  for (const auto& name : cli::commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", inv.config_path, "TOML experiment file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out", inv.out_dir, "Directory for CSV artifacts and summary.txt")
        ->required();
    sub->add_option("--override", inv.overrides, "key=value, e.g. run.dt=0.01 (repeatable)");
  }
  app.get_subcommand("spectrum")->description("Non-resonance reports at zero and infinity");
  app.get_subcommand("evolve")->description("Integrate one trajectory with monitors");
  app.get_subcommand("equilibria")->description("Multi-start equilibrium census");
  app.get_subcommand("homotopy")->description("A-priori bound scan along the linear homotopy");
  app.get_subcommand("heteroclinic")->description("Connections from 0 to nontrivial equilibria");
  app.get_subcommand("admissibility")->description("Endpoint tails and compactness proxy");
  app.get_subcommand("convergence")->description("Continuous dependence on the nonlinearity");
  app.get_subcommand("certify")->description("Check every structural hypothesis on the model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::exit_error;
  }
  inv.command = app.get_subcommands().front()->get_name();
  return cli::run(inv, std::cout, std::cerr);
}
