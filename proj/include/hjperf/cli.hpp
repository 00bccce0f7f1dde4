#pragma once

#include "hjperf/experiments.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace hjperf {

/// Direct solve of one epsilon-problem, written as solution.csv.
struct SolveConfig {
  ModelSpec model{Family::Free, 0.0, 0.0, std::nullopt, {std::nullopt, std::nullopt, 3.0}};
  PerforatedDomain domain{HoleShape::disc(0.25), 1.0, DefectSpec::none()};
  DomainTag tag = DomainTag::OmegaEps;
  InitialData g = InitialData::linear(Point2(-1.0, 0.0));
  double epsilon = 0.25;
  double h = 0.05;
  double dt = 0.0;  // 0 means h
  double T = 1.0;
  std::vector<double> times;
  std::optional<LatticeBox> box;  // fast coordinates; empty means the periodic cell
};

struct RunConfig {
  enum class Kind { Effective, Solve, Rate, Dilute, Defect, Validate };

  Kind kind = Kind::Effective;
  EffectiveConfig effective;
  SolveConfig solve;
  RateConfig rate;
  DiluteConfig dilute;
  DefectConfig defect = DefectConfig::line_e1();
  ValidateConfig validate;

  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  bool timing = false;
  int threads = 1;
};

std::string to_string(RunConfig::Kind kind);

/// Parses and validates a JSON config. Unknown keys, wrong types and bad
/// values raise ConfigError naming the offending key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

enum ExitCode { kExitOk = 0, kExitFail = 1, kExitConfig = 2, kExitNumerical = 3 };

/// Runs the configured experiment and writes its outputs. Returns kExitOk or
/// kExitFail; errors propagate as exceptions.
int execute(const RunConfig& config, std::ostream& log);

/// Full entry point: load, run, map errors to exit codes and messages.
int run(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_dir,
        bool quiet, std::ostream& out, std::ostream& err);

}  // namespace hjperf
