#pragma once

#include "hjperf/effective.hpp"
#include "hjperf/metric.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace hjperf {

/// Affine initial data g(x) = p.x + c.
struct InitialData {
  enum class Kind { LinearG, Zero, Constant };

  Kind kind = Kind::Zero;
  Point2 p = Point2::Zero();
  double c = 0.0;

  static InitialData zero() { return {}; }
  static InitialData constant(double c) { return {Kind::Constant, Point2::Zero(), c}; }
  static InitialData linear(const Point2& p, double c = 0.0) { return {Kind::LinearG, p, c}; }

  double lip() const { return kind == Kind::LinearG ? p.norm() : 0.0; }
  double operator()(const Point2& x) const { return p.dot(x) + c; }
};

enum class DomainTag { OmegaEps, WholeSpace, WEps };

std::string to_string(DomainTag tag);

/// Solution of an epsilon-problem. The lattice lives in fast coordinates
/// X = x/epsilon; stored values are in slow units. On a torus lattice the
/// stored values are u - g, which is epsilon-periodic for affine g.
struct ValueField {
  DomainTag tag = DomainTag::OmegaEps;
  double epsilon = 1.0;
  InitialData g;
  CostField field;

  const SpaceTimeLattice& lattice() const { return *field.lattice; }
  bool reduced() const { return lattice().topology == Topology::Torus; }
  double dt() const { return epsilon * lattice().dt; }
  double horizon() const { return field.steps * dt(); }
  int step_of(double t) const;

  /// Slow position of a node (the representative in [0, epsilon)^2 on a torus).
  Point2 position(int node) const { return epsilon * lattice().point(node); }
  /// u at a node and kept step; +inf at inadmissible nodes.
  double value(int step, int node) const;
  /// u at the node nearest to the slow point x, snapped; +inf when that node
  /// is inadmissible or outside the box.
  double at(const Point2& x, double t) const;
  /// Snapped slow position used by at().
  Point2 snap(const Point2& x) const;
  /// Slow position of the nearest admissible node within `fast_radius` (in
  /// fast units) of x, unwrapped on a torus; throws Unreachable if none.
  Point2 snap_admissible(const Point2& x, double fast_radius) const;
};

/// u^eps on Omega_eps (state constraint). The lattice domain must be free of
/// defects.
ValueField solve_ueps(LatticePtr lat, const HamiltonianModel& model, const InitialData& g,
                      double epsilon, double T, const std::vector<double>& snapshot_times = {});

/// u~^eps on the whole space: the lattice domain must have no holes.
ValueField solve_tilde_ueps(LatticePtr lat, const HamiltonianModel& model, const InitialData& g,
                            double epsilon, double T,
                            const std::vector<double>& snapshot_times = {});

/// w^eps on W_eps: defect holes are admissible.
ValueField solve_weps(LatticePtr lat, const HamiltonianModel& model, const InitialData& g,
                      double epsilon, double T, const std::vector<double>& snapshot_times = {});

/// Effective Hamiltonian / Lagrangian pair fed to the Hopf-Lax formula.
struct EffectiveModel {
  std::function<double(const Point2&)> hbar;
  std::function<double(const Point2&)> lbar;

  /// H-bar = |p|^2/2, L-bar = |v|^2/2.
  static EffectiveModel quadratic();
  static EffectiveModel from_grid(const LbarGrid& grid, const HamiltonianModel& model);
};

/// inf over y of t L-bar((x - y)/t) + g(y). For affine g with H-bar known this
/// is exactly p.x + c - t H-bar(p); otherwise a y-grid of spacing y_step over
/// the closed ball of the given radius is scanned, ties toward smaller |x - y|.
double hopf_lax(const EffectiveModel& eff, const InitialData& g, const Point2& x, double t,
                double radius, double y_step);

/// u-bar(x, t) = inf over y of m-bar*(t, y, x) + g(y) with m-bar* from the
/// sampler, whose time must equal t. The y-grid is x - step Z^2 within the
/// sampler coverage.
double ubar_from_mbar(const LbarSampler& sampler, const InitialData& g, const Point2& x, double t,
                      double y_step = 0.0);

/// CSV with header t,x,y,value (slow coordinates, finite values only).
void write_value_field_csv(const ValueField& u, std::ostream& os);

}  // namespace hjperf
