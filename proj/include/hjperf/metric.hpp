#pragma once

#include "hjperf/hamiltonians.hpp"
#include "hjperf/lattice.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <vector>

namespace hjperf {

using LatticePtr = std::shared_ptr<const SpaceTimeLattice>;

/// Per-step costs scale * (dt L(mid, d h/dt) - tilt . d h), indexed by the
/// residue class of the target node and the stencil entry. L is Z^2-periodic,
/// so the residue of the target fixes the midpoint coefficient.
struct StepCosts {
  int stencil_size = 0;
  std::vector<double> table;

  double operator()(int residue, int s) const {
    return table[static_cast<std::size_t>(residue) * stencil_size + s];
  }
};

StepCosts make_step_costs(const SpaceTimeLattice& lat, const HamiltonianModel& model,
                          const Point2& tilt = Point2::Zero(), double scale = 1.0);

/// Result of a forward dynamic program: value slices at the kept steps and,
/// when requested, the stencil entry chosen at every node and step.
struct CostField {
  static constexpr std::uint8_t kNoParent = 255;

  LatticePtr lattice;
  int steps = 0;
  std::map<int, std::vector<double>> slices;
  std::vector<std::vector<std::uint8_t>> parents;  // parents[k-1] for the update k-1 -> k

  double horizon() const { return steps * lattice->dt; }
  bool has_slice(int step) const { return slices.count(step) > 0; }
  const std::vector<double>& slice(int step) const;
  double value(int step, int node) const { return slice(step)[node]; }
  const std::vector<double>& final_slice() const { return slice(steps); }
};

/// Runs `steps` updates new[z] = min_s old[z - d_s] + c(z, s) from `initial`.
/// Ties go to the smallest predecessor index. Keeps slice 0, the final slice
/// and every step listed in `keep`.
CostField propagate(LatticePtr lattice, const StepCosts& costs, std::vector<double> initial,
                    int steps, const std::vector<int>& keep = {}, bool record_parents = false);

/// Number of steps of length dt in t; throws unless t is a multiple of dt.
int steps_for(double t, double dt, const char* where);

struct DiscretePath {
  std::vector<double> times;
  std::vector<Point2> points;
  double total_action = 0.0;
};

/// Backtrace from `sink` at the final step. Needs a field with parents.
DiscretePath optimal_path(const CostField& field, int sink);

/// Minimal discrete action from node x to node y in time t; x and y are
/// snapped to the nearest node, which must be admissible.
double cost_m(LatticePtr lat, const HamiltonianModel& model, double t, const Point2& x,
              const Point2& y);

/// Same as cost_m on the defect-augmented node set carried by the lattice.
double cost_md(LatticePtr lat, const HamiltonianModel& model, double t, const Point2& x,
               const Point2& y);

/// Minimum over boundary anchors x~ - x in Y and y~ - y in Y of the discrete m.
double cost_mstar(LatticePtr lat, const HamiltonianModel& model, double t, const Point2& x,
                  const Point2& y);

/// Field from a set of source nodes with value 0.
CostField source_field(LatticePtr lat, const HamiltonianModel& model, const std::vector<int>& sources,
                       int steps, const std::vector<int>& keep = {}, bool record_parents = false);

struct Extrapolation {
  double value = 0.0;     // c_inf
  double slope = 0.0;     // c_1
  double residual = 0.0;  // RMS misfit of the fit
};

/// Least squares a_k = c_inf + c_1/k.
Extrapolation fit_inverse_k(const std::vector<int>& k_list, const std::vector<double>& a);

struct SamplerSpec {
  double h = 0.05;
  double dt = 0.0;  // 0 means h
  double t = 1.0;
  std::vector<int> k_list = {2, 4, 8};
  double v_radius = 3.0;  // largest |y|/t the sampler must cover
  double margin = 1.5;    // extra cells around the reachable region
};

/// m-bar*(t, 0, y) for many y from one multi-source dynamic program.
///
/// Sources are the boundary anchors in the unit cell around 0 (the single node
/// at 0 when the domain has no holes). For each k the field after k t / dt
/// steps gives a_k(y) = min over anchors around k y of the field, divided by k;
/// the k-list is then extrapolated with fit_inverse_k.
class LbarSampler {
 public:
  LbarSampler(const PerforatedDomain& dom, const HamiltonianModel& model, const SamplerSpec& spec);

  struct Estimate {
    double value = kInf;
    double residual = 0.0;
    std::vector<double> a_k;
  };

  const SamplerSpec& spec() const { return spec_; }
  const SpaceTimeLattice& lattice() const { return *lat_; }
  bool covers(const Point2& y) const;

  /// m-bar*(t, 0, y). Throws Unreachable when a sink has no finite value.
  Estimate mbar(const Point2& y) const;
  /// L-bar(v) = m-bar*(t, 0, t v) / t.
  Estimate lbar(const Point2& v) const;

 private:
  SamplerSpec spec_;
  bool point_anchor_ = false;
  LatticePtr lat_;
  CostField field_;
  std::vector<int> step_of_k_;
};

/// CSV with header t,x,y,value for the kept slices (finite values only).
void write_cost_field_csv(const CostField& field, std::ostream& os);
/// CSV with header s,x,y.
void write_path_csv(const DiscretePath& path, std::ostream& os);

}  // namespace hjperf
