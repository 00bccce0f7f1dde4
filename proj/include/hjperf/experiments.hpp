#pragma once

#include "hjperf/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hjperf {

/// Model coefficients whose hole support follows the domain the model is
/// built for (the dilute sweep rescales the holes per epsilon).
struct ModelSpec {
  Family family = Family::Free;
  double amplitude = 0.0;  // alpha (KineticWeight) or beta (KineticPlusPotential)
  double width = 0.0;      // rho or rho_v
  std::optional<double> lip_g;  // Lip(g) of the run when empty
  ModelOverrides overrides;

  HamiltonianModel build(const PerforatedDomain& dom, double lip) const;
};

/// Probe points (slow coordinates) and probe times.
struct ProbeSet {
  std::vector<Point2> points;
  std::vector<double> times;

  /// 5x5 grid with spacing 0.3 centred at 0, restricted to the closed unit
  /// ball, at times {0.5, 1}.
  static ProbeSet default_grid();
};

struct RunOptions {
  int threads = 1;
  bool timing = false;  // runtime_s is NaN unless set, to keep outputs reproducible
};

// ---------------------------------------------------------------- rate

struct RateConfig {
  ModelSpec model{Family::Free, 0.0, 0.0, std::nullopt, {std::nullopt, std::nullopt, 3.0}};
  PerforatedDomain domain{HoleShape::disc(0.25), 1.0, DefectSpec::none()};
  InitialData g = InitialData::linear(Point2(-1.0, 0.0));
  std::vector<double> epsilons{0.25, 0.125, 0.0625};
  double h = 0.02;  // fast lattice spacing of the epsilon-problems
  SamplerSpec sampler;
  ProbeSet probes = ProbeSet::default_grid();
  double probe_radius = 0.5;  // fast units
  double min_slope = 0.8;
  RunOptions run;
};

struct RateRow {
  double epsilon = 0.0;
  double sup_error = 0.0;
  double runtime_s = 0.0;
};

struct RateTable {
  std::vector<RateRow> rows;
  std::vector<double> floor_errors;  // hole-free control run, per epsilon
  double floor = 0.0;
  double hbar = 0.0;        // metric H-bar(Dg) of the perforated domain
  double hbar_floor = 0.0;  // same for the hole-free control
  double slope = 0.0;
  double intercept = 0.0;
  bool fitted = false;
  bool decreasing = false;
  bool pass = false;
};

/// sup over probes of |u^eps - u| with u from the Hopf-Lax formula fed by
/// the metric H-bar, plus a hole-free control run that measures the floor.
RateTable rate_experiment(const RateConfig& config);

// ---------------------------------------------------------------- dilute

struct DiluteConfig {
  ModelSpec model{Family::StripeWeight, 0.0, 0.0, std::nullopt, {std::nullopt, std::nullopt, 3.0}};
  HoleShape hole = HoleShape::disc(0.25);
  double eta_exponent = 0.5;  // eta(eps) = eps^exponent
  InitialData g = InitialData::linear(Point2(-1.0, 0.0));
  std::vector<double> epsilons{0.25, 0.125, 0.0625, 0.03125};
  double h = 0.02;
  std::vector<double> times{0.5, 1.0};
  std::vector<double> lambda_list{0.1, 0.05};
  double tolerance = 0.02;
  double sweep_epsilon = 0.25;
  std::vector<double> sweep_etas{0.8, 0.6, 0.4, 0.3, 0.2};
  RunOptions run;
};

struct DiluteRow {
  double epsilon = 0.0;
  double eta = 0.0;
  double gap = 0.0;    // max over nodes and times of u^eps - u~^eps
  double bound = 0.0;  // C_c (eps + eta T) at the last time
  bool pass = false;
  double violation[4] = {0.0, 0.0, 0.0, 0.0};  // lhs - rhs of each inequality, maxed
  double ratio_c = 0.0;  // max (u^eps - u~^eps) / (eps + eta t)
  double ratio_sharp = 0.0;  // same against eps eta + eta t
};

struct DiluteTable {
  std::vector<DiluteRow> rows;
  double hbar0 = 0.0;  // whole-space H-bar(Dg)
  double C_a = 0.0, C_c = 0.0, C_d = 0.0;
  double regression_C = 0.0;
  double regression_residual = 0.0;
  double ratio_spread = 0.0;  // max/min of ratio_c over the sweep
  std::vector<double> sweep_etas;
  std::vector<double> sweep_gaps;
  double sweep_c = 0.0;  // gap = c eta^2 + b
  double sweep_b = 0.0;
  bool pass = false;
};

/// Four-inequality sandwich per epsilon with constants calibrated on the
/// first (largest) epsilon, the gap regression, and the eta-sweep at fixed
/// epsilon for the quadratic lower bound.
DiluteTable dilute_experiment(const DiluteConfig& config);

// ---------------------------------------------------------------- defect

struct DefectConfig {
  DefectSpec defects = DefectSpec::line_e1();
  ModelSpec model;
  HoleShape hole;
  InitialData g;
  std::vector<double> epsilons;
  double h = 0.05;
  std::vector<Point2> probes_fast;  // probes in fast coordinates X = x/eps
  std::vector<double> times{1.0};
  std::vector<double> lambda_list{0.1, 0.05};
  double tolerance = 0.02;
  double limit_tolerance = 0.05;
  RunOptions run;

  static DefectConfig line_e1();
  static DefectConfig squares_e1();
  static DefectConfig singleton0();
  /// Defaults for the given defect kind.
  static DefectConfig defaults(DefectSpec::Kind kind);
};

struct DefectRow {
  double epsilon = 0.0;
  Point2 probe = Point2::Zero();  // slow, snapped
  double t = 0.0;
  double w = 0.0;
  double u = 0.0;
  double gap = 0.0;    // u - w
  double bound = 0.0;  // the gap the configuration must show
  bool pass = false;
};

struct DefectTable {
  DefectSpec::Kind kind = DefectSpec::Kind::LineE1;
  std::vector<DefectRow> rows;
  double hbar = 0.0;
  double quantity = 0.0;  // theta (LineE1), delta (SquaresE1), max V (Singleton0)
  double weight_integral = 0.0;  // SquaresE1: integral of 1/a across the detour row
  double rate_constant = 0.0;  // max gap / (omega-regressor + eps)
  bool pass = false;
};

/// w^eps at the probes on a truncated box (which can only raise w), compared
/// with u = g - t H-bar(Dg) of the defect-free domain.
DefectTable defect_experiment(const DefectConfig& config);

// ---------------------------------------------------------------- effective

struct EffectiveConfig {
  ModelSpec model{Family::Free, 0.0, 0.0, std::nullopt, {std::nullopt, std::nullopt, 3.0}};
  PerforatedDomain domain{HoleShape::disc(0.25), 1.0, DefectSpec::none()};
  std::vector<Point2> p_list{Point2(-1.0, 0.0), Point2(1.0, 0.0)};
  SamplerSpec sampler;
  double v_step = 0.0;  // 0 means 1/gcd(k_list)
  double cell_h = 0.05;
  std::vector<double> lambda_list{0.1, 0.05};
  bool lbar_rows = true;
};

/// L-bar grid, metric and cell H-bar for each p, and the inf-sup certificate
/// min(sup H(y, p), sup H(y, p + D corrector)).
EffectiveTable effective_experiment(const EffectiveConfig& config);

// ---------------------------------------------------------------- validate

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct ValidateConfig {
  double h = 0.05;
  int legendre_samples = 1000;
  std::uint64_t seed = 0;
};

/// Invariant suites on small fixtures: DPP identity, hole monotonicity of m,
/// the nodewise sandwich u~ <= w <= u, Legendre duality, (A5), additivity
/// defects of m*, |m - m*|, homogeneity of m-bar*, and u-bar vs Hopf-Lax.
std::vector<Check> validate_suite(const ValidateConfig& config);

// ---------------------------------------------------------------- report

struct Report {
  std::optional<RateTable> rate;
  std::optional<DiluteTable> dilute;
  std::optional<DefectTable> defect;
  std::optional<EffectiveTable> effective;
  std::optional<std::vector<Check>> checks;
  bool pass = true;
};

/// Writes one CSV per present table and summary.json into out_dir. An empty
/// table gets a header-only CSV and "no data" in the summary.
void emit_report(const Report& report, const std::filesystem::path& out_dir);

void write_rate_csv(const RateTable& t, std::ostream& os);
void write_dilute_csv(const DiluteTable& t, std::ostream& os);
void write_defect_csv(const DefectTable& t, std::ostream& os);

/// Least squares slope and intercept of log y against log x.
std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hjperf
