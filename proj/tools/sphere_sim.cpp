#include <iostream>

#include <CLI11.hpp>

#include "rollbot/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Velocity-control simulations of a pendulum-driven spherical robot"};
  app.require_subcommand(1);

  rollbot::RunConfig rc;
  std::uint64_t seed = 0;
  CLI::App* run = app.add_subcommand("run", "Run the rollout(s) described by a config file");
  run->add_option("config", rc.config_path, "Scenario/config file")->required()->check(CLI::ExistingFile);
  run->add_option("--mode", rc.mode, "PD, PID, PD+FNN, PID+FNN or compare")
      ->check(CLI::IsMember({"PD", "PID", "PD+FNN", "PID+FNN", "compare"}));
  CLI::Option* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", rc.output_dir, "Output directory")->capture_default_str();
  run->add_flag("--plots", rc.plots, "Write SVG plots");
  run->add_option("--snapshot-every", rc.snapshot_every,
                  "Write FNN parameters every n rows (0 = off)");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) rc.seed = seed;
  return rollbot::run_command(rc, std::cout);
}
