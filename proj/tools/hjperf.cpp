#include "hjperf/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"State-constraint HJ homogenization lab"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  std::string config;
  std::string out;
  bool quiet = false;
  run->add_option("config", config, "Path to the JSON config")->required();
  run->add_option("--out", out, "Output directory (overrides output.directory)");
  run->add_flag("--quiet", quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hjperf::kExitConfig;
  }
  std::optional<std::filesystem::path> out_dir;
  if (!out.empty()) out_dir = out;
  return hjperf::run(config, out_dir, quiet, std::cout, std::cerr);
}
