#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "symcurv/cli.hpp"
#include "symcurv/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"symcurv: curvature-operator checks and surface solves from a config file"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  std::optional<std::string> output;
  app.add_option("config", config_path, "INI-style run configuration")->required();
  app.add_option("--seed", seed, "override [run] seed");
  app.add_option("--trials", trials, "override [run] trials")->check(CLI::PositiveNumber);
  app.add_option("--output", output, "override [run] output_dir");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : symcurv::kExitError;
  }

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot read " << config_path << "\n";
    return symcurv::kExitError;
  }
  std::stringstream text;
  text << in.rdbuf();

  symcurv::RunConfig config;
  try {
    config = symcurv::parse_config(text.str());
  } catch (const symcurv::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return symcurv::kExitError;
  }
  if (seed) config.seed = *seed;
  if (trials) config.trials = *trials;
  if (output) config.output_dir = *output;
  return symcurv::execute(config, std::cout, std::cerr);
}
