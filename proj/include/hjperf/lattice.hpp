#pragma once

#include "hjperf/geometry.hpp"
#include "hjperf/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace hjperf {

/// Axis-aligned rectangle in cell units.
struct LatticeBox {
  Point2 lo = Point2::Zero();
  Point2 hi = Point2::Zero();

  static LatticeBox cells(int i0, int j0, int i1, int j1) {
    return {Point2(i0 - 0.5, j0 - 0.5), Point2(i1 + 0.5, j1 + 0.5)};
  }
};

enum class Topology { Box, Torus };

/// Uniform node set of spacing h = 1/n over a box (or the unit torus) with the
/// admissible nodes of a domain and the admissible steps of the DP stencil.
///
/// Nodes carry global integer coordinates (gi, gj) with position (gi, gj)/n and
/// are indexed row-major: idx = (gj - j0) * nx + (gi - i0). On the torus
/// gi, gj range over [0, n) and steps wrap.
struct SpaceTimeLattice {
  static constexpr std::uint8_t kAdmissible = 1;
  static constexpr std::uint8_t kBoundary = 2;

  Topology topology = Topology::Box;
  PerforatedDomain domain;
  double h = 0.0;
  double dt = 0.0;
  double M0 = 0.0;
  int n = 0;
  int i0 = 0, j0 = 0;
  int nx = 0, ny = 0;

  std::vector<std::uint8_t> flags;
  std::vector<IVec2> stencil;       // node offsets d with |d| h <= M0 dt, row-major order
  int stencil_radius = 0;           // max |d_x|, |d_y|
  int mask_words = 0;
  std::vector<std::uint64_t> step_mask;  // per node: bit s set iff z - d_s -> z is admissible

  int size() const { return nx * ny; }
  int stencil_size() const { return static_cast<int>(stencil.size()); }

  IVec2 global(int idx) const { return IVec2(i0 + idx % nx, j0 + idx / nx); }
  Point2 point(int idx) const {
    const IVec2 g = global(idx);
    return Point2(g.x() / static_cast<double>(n), g.y() / static_cast<double>(n));
  }
  /// Index of the node with global coordinates g, or -1 outside the box. On
  /// the torus g is reduced modulo n.
  int index(const IVec2& g) const;
  /// Residue class of the node modulo the unit cell, in [0, n^2).
  int residue(int idx) const;

  bool admissible(int idx) const { return flags[idx] & kAdmissible; }
  bool boundary(int idx) const { return flags[idx] & kBoundary; }
  bool step_ok(int idx, int s) const {
    return (step_mask[static_cast<std::size_t>(idx) * mask_words + (s >> 6)] >> (s & 63)) & 1u;
  }
  /// Predecessor of idx along stencil entry s, or -1.
  int predecessor(int idx, int s) const { return index(global(idx) - stencil[s]); }

  /// Nearest node to x (any flag), -1 when outside the box.
  int nearest_node(const Point2& x) const;
  /// Nearest admissible node within `radius` of x, -1 if none. Ties go to the
  /// smaller index.
  int nearest_admissible(const Point2& x, double radius) const;
  /// Admissible boundary nodes z with z - x in the closed unit cell [-1/2,1/2]^2.
  std::vector<int> anchors(const Point2& x) const;

  long admissible_count() const;
  long boundary_count() const;
};

/// Builds the admissible node set of `dom` inside `box`. Requires 1/h to be an
/// integer, h <= feature_size/4 and dt * M0 >= 2h.
SpaceTimeLattice build_lattice(const PerforatedDomain& dom, double h, const LatticeBox& box,
                               double dt, double M0);

/// Periodic single cell [0,1)^2 of a defect-free domain.
SpaceTimeLattice build_periodic_cell(const PerforatedDomain& dom, double h, double dt, double M0);

/// True iff the segment a -> b stays in the closed domain: both endpoints and
/// the interior samples at fractions k/5 are outside every open hole.
bool segment_clear(const PerforatedDomain& dom, const Point2& a, const Point2& b);

/// CSV with header x,y,admissible,boundary, one row per node.
void write_lattice_csv(const SpaceTimeLattice& lat, std::ostream& os);

}  // namespace hjperf
