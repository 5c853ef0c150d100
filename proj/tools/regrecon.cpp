// regrecon <experiment> --config <file> [--out <dir>] [--seed <u64>]
//
// Exit status: 0 pass, 1 numerical acceptance failure, 2 configuration error.
#include "regrecon/experiments.hpp"
#include "regrecon/report.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"regularity structure reconstruction experiments"};
  std::string experiment, config, out = ".";
  std::optional<std::uint64_t> seed;
  app.add_option("experiment", experiment, "experiment name")
      ->required()
      ->check(CLI::IsMember(regrecon::experiment_names()));
  app.add_option("--config", config, "INI config file")->required();
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "overrides run.seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const auto cfg = regrecon::Config::load(config);
    const auto res = regrecon::run_experiment(experiment, cfg, seed);
    regrecon::write_outputs(res, out);
    std::cout << regrecon::dump_json(res.summary);
    return res.pass ? 0 : 1;
  } catch (const regrecon::ConfigError& e) {
    std::cerr << "regrecon: " << e.what() << "\n";
    return 2;
  }
}
