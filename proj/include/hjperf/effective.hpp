#pragma once

#include "hjperf/metric.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hjperf {

struct MbarResult {
  double value = 0.0;
  double residual = 0.0;
  std::vector<double> a_k;
};

/// m-bar*(t, x, y): a_k = m*(k t, k x, k y) / k for each k, each from its own
/// dynamic program on a box around the two anchor cells, then fitted with
/// a_k = c_inf + c_1/k. Hole-free domains use the point cost m instead of m*.
MbarResult mbar_star(const PerforatedDomain& dom, const HamiltonianModel& model, double t,
                     const Point2& x, const Point2& y, const std::vector<int>& k_list, double h,
                     double margin = 2.0);

/// L-bar(v) = m-bar*(1, 0, v).
double effective_lagrangian(const PerforatedDomain& dom, const HamiltonianModel& model,
                            const Point2& v, const std::vector<int>& k_list, double h);

/// L-bar sampled on the square grid step * Z^2 within the sampler coverage.
/// Velocities with no admissible discrete path are dropped (L-bar = +inf).
struct LbarGrid {
  double step = 0.0;
  double radius = 0.0;
  std::vector<int> k_list;
  std::vector<Point2> v;
  std::vector<double> value;
  std::vector<double> residual;
};

/// Default grid step: 1/gcd(k_list), so every k v is an integer vector and all
/// a_k at one v share the same anchor geometry.
double default_v_step(const std::vector<int>& k_list);

LbarGrid tabulate_lbar(const LbarSampler& sampler, double v_step = 0.0);

struct HbarEstimate {
  double value = -kInf;
  Point2 argmax = Point2::Zero();
  double residual = 0.0;  // fit residual of L-bar at the maximizer
  bool covered = true;    // the grid radius provably contains the maximizer
};

/// max over the grid of p.v - L-bar(v). `covered` uses the envelope
/// L-bar >= |v|^2/2 - K0 to bound the supremum outside the grid.
HbarEstimate effective_hamiltonian_metric(const LbarGrid& grid, const HamiltonianModel& model,
                                          const Point2& p);

/// Convenience overload building a default sampler (radius min(M0, 3)).
HbarEstimate effective_hamiltonian_metric(const PerforatedDomain& dom,
                                          const HamiltonianModel& model, const Point2& p,
                                          const std::vector<int>& k_list, double h);

struct CellResult {
  double value = 0.0;                 // extrapolated to lambda = 0
  std::vector<double> lambdas;
  std::vector<double> hbar_lambda;    // -lambda w_lambda(z0)
  std::vector<int> sweeps;
  int z0 = -1;
  std::vector<double> corrector;      // w at the smallest lambda minus its value at z0
};

/// Discounted state-constraint cell problem on the periodic cell lattice:
/// w(z) = min_s (1 - lambda dt) w(z - d_s) + dt L(mid, d_s h/dt) - p.d_s h,
/// solved by alternating Gauss-Seidel sweeps to sup-norm change <= tol.
/// The lambda list must be strictly decreasing; the estimate is the linear
/// extrapolation through the two smallest lambdas.
CellResult effective_hamiltonian_cell(LatticePtr cell, const HamiltonianModel& model,
                                      const Point2& p, const std::vector<double>& lambda_list,
                                      double tol = 1e-8, long max_sweeps = 0);

/// max over admissible cell nodes of H(y, p + D phi) with central differences
/// (one-sided next to holes, zero when both neighbours are missing).
double infsup_upper_bound(const SpaceTimeLattice& cell, const HamiltonianModel& model,
                          const Point2& p, const std::vector<double>& corrector);

struct EffectiveRow {
  std::string kind;  // Lbar, Hbar_metric, Hbar_cell, Hbar_infsup
  double component1 = 0.0;
  double component2 = 0.0;
  double value = 0.0;
  double residual = 0.0;
};

struct EffectiveTable {
  std::vector<int> k_list;
  std::vector<double> lambda_list;
  std::vector<EffectiveRow> rows;

  void add(std::string kind, const Point2& at, double value, double residual) {
    rows.push_back({std::move(kind), at.x(), at.y(), value, residual});
  }
};

/// CSV with header kind,component1,component2,value,residual.
void write_effective_csv(const EffectiveTable& table, std::ostream& os);

}  // namespace hjperf
