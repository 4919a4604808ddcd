// lagwave: command-line driver.
//
//   lagwave validate <config>
//   lagwave run <config>
//   lagwave certify <config>
//   lagwave sweep <config> --axis <key> --values <v1,v2,...> [--jobs N]

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lagwave/app.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Lagrangian gas dynamics: evolution, Riccati diagnostics, blowup certificates"};
  cli.require_subcommand(1);

  std::string config;
  auto* validate = cli.add_subcommand("validate", "check a config and the initial data");
  validate->add_option("config", config, "config file")->required();

  auto* run = cli.add_subcommand("run", "evolve, diagnose, certify and export");
  run->add_option("config", config, "config file")->required();

  auto* certify = cli.add_subcommand("certify", "certificates from the initial data only");
  certify->add_option("config", config, "config file")->required();

  std::string axis;
  std::string values;
  unsigned jobs = 0;
  auto* sweep = cli.add_subcommand("sweep", "one run per value of a config key");
  sweep->add_option("config", config, "config template")->required();
  sweep->add_option("--axis", axis, "config key to vary, e.g. grid.n")->required();
  sweep->add_option("--values", values, "comma-separated values (may be empty)")->required();
  sweep->add_option("--jobs", jobs, "concurrent runs (0 = hardware threads)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : lagwave::app::kConfig;
  }

  namespace app = lagwave::app;
  if (*validate) return app::cmd_validate(config, std::cout, std::cerr);
  if (*run) return app::cmd_run(config, std::cout, std::cerr);
  if (*certify) return app::cmd_certify(config, std::cout, std::cerr);
  std::vector<std::string> list;
  for (const auto& v : lagwave::detail::split_list(values)) list.push_back(v);
  return app::cmd_sweep(config, axis, list, std::cout, std::cerr, jobs);
}
