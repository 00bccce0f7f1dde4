#include "hjperf/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hjperf;
namespace fs = std::filesystem;

namespace {

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path d = fs::temp_directory_path() / ("hjperf_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  std::ofstream(d / "config.json") << text;
  return d;
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_text(const std::string& name, const std::string& text) {
  const fs::path d = write_config(name, text);
  std::ostringstream out, err;
  const int code = run(d / "config.json", d / "out", false, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("defaults per kind") {
  const RunConfig e = parse_config(R"({"experiment": {"kind": "effective"}})");
  CHECK(e.kind == RunConfig::Kind::Effective);
  CHECK(e.effective.domain.hole.kind == HoleShape::Kind::Disc);
  CHECK(e.effective.domain.hole.size == 0.25);
  CHECK(e.out_dir == fs::path("out"));
  CHECK(e.seed == 0);

  const RunConfig r = parse_config(R"({"experiment": {"kind": "rate"}})");
  CHECK(r.rate.epsilons == std::vector<double>{0.25, 0.125, 0.0625});

  const RunConfig d = parse_config(R"({"domain": {"defects": "singleton0"}, "experiment": {"kind": "defect"}})");
  CHECK(d.defect.defects.kind == DefectSpec::Kind::Singleton0);
  CHECK(d.defect.model.family == Family::KineticPlusPotential);

  const RunConfig v = parse_config(R"({"experiment": {"kind": "validate"}, "output": {"seed": 7}})");
  CHECK(v.validate.seed == 7);
}

TEST_CASE("schema violations") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"experiment": {"kind": "effective"}, "colour": 1})"),
                       doctest::Contains("colour"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"model": {"family": "free", "alpah": 2}, "experiment": {"kind": "effective"}})"),
                       doctest::Contains("alpah"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": {"kind": "nonsense"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": {"kind": "rate", "epsilons": "small"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"family": "free"}, "experiment": {"kind": "validate"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": {"kind": "effective", "eta_sweep": [0.5]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("effective run writes the axis value") {
  const Outcome o = run_text("effective", R"({
    "model": {"family": "free", "M0": 3},
    "domain": {"hole": "disc", "size": 0.25},
    "experiment": {"kind": "effective", "p_list": [[-1, 0]], "v_radius": 1.5}
  })");
  CHECK(o.code == kExitOk);
  const std::string csv = slurp(fs::temp_directory_path() / "hjperf_cli_effective" / "out" / "effective.csv");
  std::istringstream in(csv);
  std::string line;
  bool found = false;
  while (std::getline(in, line))
    if (line.rfind("Hbar_metric,-1,0,", 0) == 0) {
      const double v = std::stod(line.substr(17, line.find(',', 17) - 17));
      CHECK(std::abs(v - 0.5) <= 0.05);
      found = true;
    }
  CHECK(found);
}

TEST_CASE("coarse grid is a config error") {
  const Outcome o = run_text("coarse", R"({
    "domain": {"hole": "disc", "size": 0.25, "eta": 0.2},
    "grid": {"sampler_h": 0.05, "cell_h": 0.05},
    "experiment": {"kind": "effective"}
  })");
  CHECK(o.code == kExitConfig);
  CHECK(o.err.find("unresolved hole") != std::string::npos);
}

TEST_CASE("missing file and bad json") {
  std::ostringstream out, err;
  CHECK(run("/nonexistent/config.json", std::nullopt, true, out, err) == kExitConfig);
  CHECK(run_text("badjson", "{\"experiment\": ").code == kExitConfig);
}

TEST_CASE("numerical errors map to exit 3") {
  // probes at hole centres with a snap radius too small to leave the hole
  const Outcome o = run_text("unreachable", R"({
    "domain": {"hole": "disc", "size": 0.25},
    "grid": {"h": 0.05},
    "experiment": {"kind": "rate", "epsilons": [0.25, 0.125], "probe_radius": 0.01}
  })");
  CHECK(o.code == kExitNumerical);
}

TEST_CASE("solve run and determinism") {
  const std::string cfg = R"({
    "model": {"family": "free", "M0": 3},
    "domain": {"hole": "disc", "size": 0.25},
    "grid": {"h": 0.05},
    "experiment": {"kind": "solve", "epsilons": [0.25], "T": 0.5, "times": [0.25], "g": {"p": [-1, 0]}}
  })";
  const Outcome a = run_text("solve_a", cfg);
  const Outcome b = run_text("solve_b", cfg);
  CHECK(a.code == kExitOk);
  CHECK(b.code == kExitOk);
  const std::string sa = slurp(fs::temp_directory_path() / "hjperf_cli_solve_a" / "out" / "solution.csv");
  CHECK(sa.rfind("t,x,y,value\n", 0) == 0);
  CHECK(sa == slurp(fs::temp_directory_path() / "hjperf_cli_solve_b" / "out" / "solution.csv"));
}
