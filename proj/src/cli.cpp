#include "hjperf/cli.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace hjperf {

namespace {

using nlohmann::json;

constexpr const char* kWhere = "cli.config";

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError(kWhere, key + ": " + what);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) bad(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

void read(const json& obj, const char* key, const std::string& path, double& out) {
  if (const json* v = find(obj, key)) out = number(*v, path + "." + key);
}

void read(const json& obj, const char* key, const std::string& path, bool& out) {
  if (const json* v = find(obj, key)) {
    if (!v->is_boolean()) bad(path + "." + key, "expected a boolean");
    out = v->get<bool>();
  }
}

void read(const json& obj, const char* key, const std::string& path, std::optional<double>& out) {
  if (const json* v = find(obj, key)) out = v->is_null() ? std::nullopt : std::optional<double>(number(*v, path + "." + key));
}

std::vector<double> numbers(const json& v, const std::string& key) {
  if (!v.is_array()) bad(key, "expected an array of numbers");
  std::vector<double> out;
  for (const json& x : v) out.push_back(number(x, key));
  return out;
}

Point2 point(const json& v, const std::string& key) {
  const std::vector<double> xs = numbers(v, key);
  if (xs.size() != 2) bad(key, "expected [x, y]");
  return Point2(xs[0], xs[1]);
}

std::vector<Point2> points(const json& v, const std::string& key) {
  if (!v.is_array()) bad(key, "expected an array of [x, y]");
  std::vector<Point2> out;
  for (const json& p : v) out.push_back(point(p, key));
  return out;
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

// ---------------------------------------------------------------- sections

void apply_model(const json& j, ModelSpec& m) {
  check_keys(j, "model", {"family", "alpha", "rho", "beta", "rho_v", "lip_g", "C0", "K0", "M0"});
  if (const json* f = find(j, "family")) {
    const std::string s = text(*f, "model.family");
    if (s == "free") m = {Family::Free, 0.0, 0.0, m.lip_g, m.overrides};
    else if (s == "kinetic_weight") m = {Family::KineticWeight, 2.0, 0.05, m.lip_g, m.overrides};
    else if (s == "kinetic_plus_potential") m = {Family::KineticPlusPotential, 0.5, 0.0, m.lip_g, m.overrides};
    else if (s == "stripe_weight") m = {Family::StripeWeight, 0.0, 0.0, m.lip_g, m.overrides};
    else bad("model.family", "unknown family '" + s + "'");
  }
  const bool kinetic = m.family == Family::KineticWeight;
  const bool potential = m.family == Family::KineticPlusPotential;
  for (const char* k : {"alpha", "rho"})
    if (find(j, k) && !kinetic) bad(std::string("model.") + k, "only applies to kinetic_weight");
  for (const char* k : {"beta", "rho_v"})
    if (find(j, k) && !potential) bad(std::string("model.") + k, "only applies to kinetic_plus_potential");
  read(j, kinetic ? "alpha" : "beta", "model", m.amplitude);
  read(j, kinetic ? "rho" : "rho_v", "model", m.width);
  read(j, "lip_g", "model", m.lip_g);
  read(j, "C0", "model", m.overrides.C0);
  read(j, "K0", "model", m.overrides.K0);
  read(j, "M0", "model", m.overrides.M0);
}

HoleShape parse_hole(const json& j, HoleShape hole) {
  std::string kind = to_string(hole.kind);
  if (const json* v = find(j, "hole")) kind = text(*v, "domain.hole");
  double size = hole.size;
  read(j, "size", "domain", size);
  if (kind == "disc") return HoleShape::disc(size);
  if (kind == "square") return HoleShape::square(size);
  if (kind == "none") return HoleShape::none();
  bad("domain.hole", "expected disc, square or none");
}

DefectSpec parse_defects(const json& v) {
  if (v.is_array()) {
    std::vector<IVec2> pts;
    for (const json& p : v) {
      const Point2 q = point(p, "domain.defects");
      if (q.x() != std::round(q.x()) || q.y() != std::round(q.y()))
        bad("domain.defects", "defect sites must be integer");
      pts.emplace_back(static_cast<int>(q.x()), static_cast<int>(q.y()));
    }
    return DefectSpec::explicit_points(std::move(pts));
  }
  const std::string s = text(v, "domain.defects");
  if (s == "none") return DefectSpec::none();
  if (s == "singleton0") return DefectSpec::singleton0();
  if (s == "line_e1") return DefectSpec::line_e1();
  if (s == "squares_e1") return DefectSpec::squares_e1();
  bad("domain.defects", "expected none, singleton0, line_e1, squares_e1 or a list of sites");
}

void apply_domain(const json& j, PerforatedDomain& d) {
  d.hole = parse_hole(j, d.hole);
  read(j, "eta", "domain", d.eta);
  if (const json* v = find(j, "defects")) d.defects = parse_defects(*v);
  d.validate();
}

InitialData parse_g(const json& j) {
  check_keys(j, "experiment.g", {"p", "c"});
  Point2 p = Point2(-1.0, 0.0);
  double c = 0.0;
  if (const json* v = find(j, "p")) p = point(*v, "experiment.g.p");
  read(j, "c", "experiment.g", c);
  if (p.isZero()) return c == 0.0 ? InitialData::zero() : InitialData::constant(c);
  return InitialData::linear(p, c);
}

std::vector<int> parse_k_list(const json& v) {
  std::vector<int> out;
  for (double k : numbers(v, "experiment.k_list")) {
    if (k != std::round(k)) bad("experiment.k_list", "entries must be integers");
    out.push_back(static_cast<int>(k));
  }
  return out;
}

RunConfig::Kind parse_kind(const std::string& s) {
  if (s == "effective") return RunConfig::Kind::Effective;
  if (s == "solve") return RunConfig::Kind::Solve;
  if (s == "rate") return RunConfig::Kind::Rate;
  if (s == "dilute") return RunConfig::Kind::Dilute;
  if (s == "defect") return RunConfig::Kind::Defect;
  if (s == "validate") return RunConfig::Kind::Validate;
  bad("experiment.kind", "expected effective, solve, rate, dilute, defect or validate");
}

const json kEmpty = json::object();

const json& section(const json& root, const char* key) {
  const json* v = find(root, key);
  if (!v) return kEmpty;
  if (!v->is_object()) bad(key, "expected an object");
  return *v;
}

}  // namespace

std::string to_string(RunConfig::Kind kind) {
  switch (kind) {
    case RunConfig::Kind::Effective: return "effective";
    case RunConfig::Kind::Solve: return "solve";
    case RunConfig::Kind::Rate: return "rate";
    case RunConfig::Kind::Dilute: return "dilute";
    case RunConfig::Kind::Defect: return "defect";
    case RunConfig::Kind::Validate: return "validate";
  }
  return "?";
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(kWhere, std::string("invalid JSON: ") + e.what());
  }
  check_keys(root, "", {"model", "domain", "grid", "experiment", "output", "threads"});
  const json& model = section(root, "model");
  const json& domain = section(root, "domain");
  const json& grid = section(root, "grid");
  const json& exp = section(root, "experiment");
  const json& output = section(root, "output");
  check_keys(domain, "domain", {"hole", "size", "eta", "eta_exponent", "defects"});
  check_keys(grid, "grid", {"h", "dt", "box", "cell_h", "sampler_h", "margin"});
  check_keys(exp, "experiment",
             {"kind", "epsilons", "p_list", "k_list", "lambda_list", "T", "times", "probes", "g",
              "v_radius", "v_step", "tolerance", "eta_sweep", "sweep_epsilon", "domain_tag",
              "min_slope", "lbar_rows", "legendre_samples", "probe_radius"});
  check_keys(output, "output", {"directory", "seed", "timing"});

  RunConfig c;
  if (const json* v = find(exp, "kind")) c.kind = parse_kind(text(*v, "experiment.kind"));
  using K = RunConfig::Kind;

  // Keys that only make sense for some kinds are rejected elsewhere, so a
  // typo in a kind-specific field cannot silently fall back to a default.
  auto only = [&](const json& obj, const std::string& path, const char* key, std::initializer_list<K> kinds) {
    if (!find(obj, key)) return;
    for (K k : kinds)
      if (k == c.kind) return;
    bad(path + "." + key, "does not apply to kind '" + to_string(c.kind) + "'");
  };
  only(domain, "domain", "eta_exponent", {K::Dilute});
  only(grid, "grid", "dt", {K::Solve});
  only(grid, "grid", "box", {K::Solve});
  only(grid, "grid", "cell_h", {K::Effective});
  only(grid, "grid", "sampler_h", {K::Effective, K::Rate});
  only(grid, "grid", "margin", {K::Effective, K::Rate});
  only(exp, "experiment", "p_list", {K::Effective});
  only(exp, "experiment", "k_list", {K::Effective, K::Rate});
  only(exp, "experiment", "v_radius", {K::Effective, K::Rate});
  only(exp, "experiment", "v_step", {K::Effective});
  only(exp, "experiment", "lbar_rows", {K::Effective});
  only(exp, "experiment", "lambda_list", {K::Effective, K::Dilute, K::Defect});
  only(exp, "experiment", "T", {K::Solve});
  only(exp, "experiment", "probes", {K::Rate, K::Defect});
  only(exp, "experiment", "probe_radius", {K::Rate});
  only(exp, "experiment", "min_slope", {K::Rate});
  only(exp, "experiment", "tolerance", {K::Dilute, K::Defect});
  only(exp, "experiment", "eta_sweep", {K::Dilute});
  only(exp, "experiment", "sweep_epsilon", {K::Dilute});
  only(exp, "experiment", "domain_tag", {K::Solve});
  only(exp, "experiment", "legendre_samples", {K::Validate});
  only(exp, "experiment", "epsilons", {K::Solve, K::Rate, K::Dilute, K::Defect});
  only(exp, "experiment", "times", {K::Solve, K::Rate, K::Dilute, K::Defect});
  only(exp, "experiment", "g", {K::Solve, K::Rate, K::Dilute, K::Defect});
  if (c.kind == K::Validate && !domain.empty()) bad("domain", "validate uses fixed fixtures");
  if (c.kind == K::Validate && !model.empty()) bad("model", "validate uses fixed fixtures");

  if (c.kind == K::Defect) {
    DefectSpec spec = DefectSpec::line_e1();
    if (const json* v = find(domain, "defects")) spec = parse_defects(*v);
    c.defect = DefectConfig::defaults(spec.kind);
    if (find(domain, "eta")) bad("domain.eta", "the defect run uses eta = 1");
    c.defect.hole = parse_hole(domain, c.defect.hole);
  }

  ModelSpec* ms = nullptr;
  PerforatedDomain* dom = nullptr;
  switch (c.kind) {
    case K::Effective: ms = &c.effective.model; dom = &c.effective.domain; break;
    case K::Solve: ms = &c.solve.model; dom = &c.solve.domain; break;
    case K::Rate: ms = &c.rate.model; dom = &c.rate.domain; break;
    case K::Dilute: ms = &c.dilute.model; break;
    case K::Defect: ms = &c.defect.model; break;
    case K::Validate: break;
  }
  if (ms) apply_model(model, *ms);
  if (dom) apply_domain(domain, *dom);
  if (c.kind == K::Dilute) {
    if (find(domain, "eta") || find(domain, "defects"))
      bad("domain", "the dilute run sets eta from eta_exponent and has no defects");
    c.dilute.hole = parse_hole(domain, c.dilute.hole);
    read(domain, "eta_exponent", "domain", c.dilute.eta_exponent);
  }

  // grid
  double h = 0.0;
  read(grid, "h", "grid", h);
  if (find(grid, "h")) {
    c.solve.h = c.rate.h = c.dilute.h = c.defect.h = c.validate.h = h;
    c.effective.sampler.h = c.effective.cell_h = h;
  }
  if (const json* v = find(grid, "sampler_h"))
    c.effective.sampler.h = c.rate.sampler.h = number(*v, "grid.sampler_h");
  read(grid, "cell_h", "grid", c.effective.cell_h);
  if (const json* v = find(grid, "margin"))
    c.effective.sampler.margin = c.rate.sampler.margin = number(*v, "grid.margin");
  read(grid, "dt", "grid", c.solve.dt);
  if (const json* v = find(grid, "box")) {
    const std::vector<double> b = numbers(*v, "grid.box");
    if (b.size() != 4) bad("grid.box", "expected [x0, y0, x1, y1]");
    c.solve.box = LatticeBox{Point2(b[0], b[1]), Point2(b[2], b[3])};
  }

  // experiment
  if (const json* v = find(exp, "epsilons")) {
    const std::vector<double> e = numbers(*v, "experiment.epsilons");
    c.rate.epsilons = c.dilute.epsilons = c.defect.epsilons = e;
    if (c.kind == K::Solve) {
      if (e.size() != 1) bad("experiment.epsilons", "solve takes exactly one epsilon");
      c.solve.epsilon = e[0];
    }
  }
  if (const json* v = find(exp, "p_list")) c.effective.p_list = points(*v, "experiment.p_list");
  if (const json* v = find(exp, "k_list")) c.effective.sampler.k_list = c.rate.sampler.k_list = parse_k_list(*v);
  if (const json* v = find(exp, "lambda_list"))
    c.effective.lambda_list = c.dilute.lambda_list = c.defect.lambda_list = numbers(*v, "experiment.lambda_list");
  read(exp, "T", "experiment", c.solve.T);
  if (const json* v = find(exp, "times")) {
    const std::vector<double> t = numbers(*v, "experiment.times");
    c.rate.probes.times = c.dilute.times = c.defect.times = c.solve.times = t;
  }
  if (const json* v = find(exp, "probes")) {
    const std::vector<Point2> p = points(*v, "experiment.probes");
    c.rate.probes.points = p;
    c.defect.probes_fast = p;
  }
  if (const json* v = find(exp, "g")) {
    const InitialData g = parse_g(*v);
    c.solve.g = c.rate.g = c.dilute.g = c.defect.g = g;
  }
  if (const json* v = find(exp, "v_radius")) c.effective.sampler.v_radius = c.rate.sampler.v_radius = number(*v, "experiment.v_radius");
  read(exp, "v_step", "experiment", c.effective.v_step);
  read(exp, "tolerance", "experiment", c.dilute.tolerance);
  read(exp, "tolerance", "experiment", c.defect.tolerance);
  if (const json* v = find(exp, "eta_sweep")) c.dilute.sweep_etas = numbers(*v, "experiment.eta_sweep");
  read(exp, "sweep_epsilon", "experiment", c.dilute.sweep_epsilon);
  read(exp, "min_slope", "experiment", c.rate.min_slope);
  read(exp, "probe_radius", "experiment", c.rate.probe_radius);
  read(exp, "lbar_rows", "experiment", c.effective.lbar_rows);
  if (const json* v = find(exp, "legendre_samples")) {
    const double n = number(*v, "experiment.legendre_samples");
    if (n < 1 || n != std::round(n)) bad("experiment.legendre_samples", "expected a positive integer");
    c.validate.legendre_samples = static_cast<int>(n);
  }
  if (const json* v = find(exp, "domain_tag")) {
    const std::string s = text(*v, "experiment.domain_tag");
    if (s == "omega_eps") c.solve.tag = DomainTag::OmegaEps;
    else if (s == "whole_space") c.solve.tag = DomainTag::WholeSpace;
    else if (s == "w_eps") c.solve.tag = DomainTag::WEps;
    else bad("experiment.domain_tag", "expected omega_eps, whole_space or w_eps");
  }

  // output
  if (const json* v = find(output, "directory")) c.out_dir = text(*v, "output.directory");
  if (const json* v = find(output, "seed")) {
    if (!v->is_number_unsigned()) bad("output.seed", "expected a non-negative integer");
    c.seed = c.validate.seed = v->get<std::uint64_t>();
  }
  read(output, "timing", "output", c.timing);
  if (const json* v = find(root, "threads")) {
    if (!v->is_number_integer() || v->get<long>() < 1) bad("threads", "expected a positive integer");
    c.threads = static_cast<int>(v->get<long>());
  }
  for (RunOptions* o : {&c.rate.run, &c.dilute.run, &c.defect.run}) {
    o->threads = c.threads;
    o->timing = c.timing;
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(kWhere, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

namespace {

ValueField run_solve(const SolveConfig& s) {
  const HamiltonianModel model = s.model.build(s.domain, s.g.lip());
  const double dt = s.dt > 0.0 ? s.dt : s.h;
  auto lat = std::make_shared<const SpaceTimeLattice>(
      s.box ? build_lattice(s.domain, s.h, *s.box, dt, model.M0)
            : build_periodic_cell(s.domain, s.h, dt, model.M0));
  switch (s.tag) {
    case DomainTag::OmegaEps: return solve_ueps(lat, model, s.g, s.epsilon, s.T, s.times);
    case DomainTag::WholeSpace: return solve_tilde_ueps(lat, model, s.g, s.epsilon, s.T, s.times);
    case DomainTag::WEps: break;
  }
  return solve_weps(lat, model, s.g, s.epsilon, s.T, s.times);
}

}  // namespace

int execute(const RunConfig& c, std::ostream& log) {
  Report report;
  using K = RunConfig::Kind;
  switch (c.kind) {
    case K::Effective:
      report.effective = effective_experiment(c.effective);
      break;
    case K::Solve: {
      const ValueField u = run_solve(c.solve);
      std::filesystem::create_directories(c.out_dir);
      std::ofstream f(c.out_dir / "solution.csv", std::ios::binary);
      if (!f) throw std::runtime_error("cannot open " + (c.out_dir / "solution.csv").string() + " for writing");
      write_value_field_csv(u, f);
      break;
    }
    case K::Rate:
      report.rate = rate_experiment(c.rate);
      report.pass = report.rate->pass;
      break;
    case K::Dilute:
      report.dilute = dilute_experiment(c.dilute);
      report.pass = report.dilute->pass;
      break;
    case K::Defect:
      report.defect = defect_experiment(c.defect);
      report.pass = report.defect->pass;
      break;
    case K::Validate:
      report.checks = validate_suite(c.validate);
      for (const Check& k : *report.checks) {
        report.pass = report.pass && k.pass;
        log << (k.pass ? "PASS " : "FAIL ") << k.name << "\n";
      }
      break;
  }
  emit_report(report, c.out_dir);
  log << to_string(c.kind) << ": " << (report.pass ? "PASS" : "FAIL") << " -> " << c.out_dir.string() << "\n";
  return report.pass ? kExitOk : kExitFail;
}

int run(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_dir,
        bool quiet, std::ostream& out, std::ostream& err) {
  std::ostringstream sink;
  std::ostream& log = quiet ? static_cast<std::ostream&>(sink) : out;
  try {
    RunConfig c = load_config(config_path);
    if (out_dir) c.out_dir = *out_dir;
    return execute(c, log);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace hjperf
