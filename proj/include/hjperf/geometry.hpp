#pragma once

#include "hjperf/types.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace hjperf {

/// Unit-cell hole D, centered at the cell center. Sizes are in cell units.
struct HoleShape {
  enum class Kind { None, Disc, Square };

  Kind kind = Kind::None;
  double size = 0.0;  // radius for Disc, half-width for Square

  static HoleShape none() { return {}; }
  static HoleShape disc(double radius) { return {Kind::Disc, radius}; }
  static HoleShape square(double half_width) { return {Kind::Square, half_width}; }

  bool empty() const { return kind == Kind::None; }
  /// Largest extent of the hole along a coordinate axis (diameter / side).
  double extent() const { return kind == Kind::None ? 0.0 : 2.0 * size; }
  /// Distance from the center to the nearest boundary point.
  double inradius() const { return kind == Kind::None ? 0.0 : size; }
};

/// Signed distance to the boundary of eta*D centered at the origin: positive
/// inside the open hole, zero on the boundary, negative outside.
template <typename Scalar>
Scalar hole_depth(const HoleShape& hole, double eta, const Vec2<Scalar>& q) {
  using std::abs;
  using std::max;
  using std::sqrt;
  const Scalar s = Scalar(eta * hole.size);
  switch (hole.kind) {
    case HoleShape::Kind::None:
      return -Scalar(std::numeric_limits<double>::infinity());
    case HoleShape::Kind::Disc:
      return s - q.norm();
    case HoleShape::Kind::Square: {
      const Scalar ax = abs(q.x()), ay = abs(q.y());
      const Scalar m = max(ax, ay);
      if (m <= s) return s - m;
      const Scalar ox = max(ax - s, Scalar(0)), oy = max(ay - s, Scalar(0));
      return -sqrt(ox * ox + oy * oy);
    }
  }
  return Scalar(0);
}

/// Nearest lattice point of Z^2 (the cell whose center is closest).
template <typename Scalar>
IVec2 cell_of(const Vec2<Scalar>& x) {
  using std::floor;
  return IVec2(static_cast<int>(floor(x.x() + Scalar(0.5))),
               static_cast<int>(floor(x.y() + Scalar(0.5))));
}

/// Index set I of cells whose hole is missing.
struct DefectSpec {
  enum class Kind { None, Singleton0, LineE1, SquaresE1, Explicit };

  Kind kind = Kind::None;
  std::vector<IVec2> points;  // Explicit only, kept sorted

  static DefectSpec none() { return {}; }
  static DefectSpec singleton0() { return {Kind::Singleton0, {}}; }
  static DefectSpec line_e1() { return {Kind::LineE1, {}}; }
  static DefectSpec squares_e1() { return {Kind::SquaresE1, {}}; }
  static DefectSpec explicit_points(std::vector<IVec2> pts);

  bool empty() const { return kind == Kind::None || (kind == Kind::Explicit && points.empty()); }
  bool contains(const IVec2& m) const;
};

struct DefectCount {
  long count = 0;
  double omega0 = 0.0;  // count / k, the defect modulus evaluated at 1/k
};

/// |I ∩ [-k,k]^2| together with |I_k|/k.
DefectCount defect_count(const DefectSpec& defects, int k);

/// Periodically perforated planar domain with hole scale eta and optional
/// missing holes. With defects the represented set is W (defect holes filled).
struct PerforatedDomain {
  HoleShape hole;
  double eta = 1.0;
  DefectSpec defects;

  bool has_holes() const { return !hole.empty(); }
  bool is_periodic() const { return defects.empty(); }

  /// Same holes, no defects: the periodic domain Omega underlying W.
  PerforatedDomain without_defects() const { return {hole, eta, DefectSpec::none()}; }
  /// Hole-free domain (the whole plane).
  static PerforatedDomain whole_space() { return {HoleShape::none(), 1.0, DefectSpec::none()}; }

  /// Smallest geometric feature the lattice must resolve: the scaled hole
  /// extent or the corridor between neighbouring holes, whichever is smaller.
  double feature_size() const;

  void validate() const;

  /// Signed depth inside the retained hole of the nearest cell; -inf when the
  /// nearest cell has no hole (hole-free domain or a defect cell).
  template <typename Scalar>
  Scalar depth(const Vec2<Scalar>& x) const {
    if (hole.empty()) return -Scalar(kInf);
    const IVec2 m = cell_of(x);
    if (defects.contains(m)) return -Scalar(kInf);
    const Vec2<Scalar> q = x - m.cast<Scalar>();
    return hole_depth(hole, eta, q);
  }
};

/// True iff x lies in the closed domain (hole boundaries are inside).
template <typename Scalar>
bool contains(const PerforatedDomain& dom, const Vec2<Scalar>& x) {
  return !(dom.depth(x) > Scalar(0));
}

struct Classification {
  enum class Kind { Exterior, Boundary, Interior };
  Kind kind = Kind::Interior;
  IVec2 hole_cell = IVec2::Zero();  // meaningful for Exterior and Boundary
};

/// Boundary means within `boundary_tol` of a retained hole boundary; Exterior
/// means strictly inside an open hole, deeper than the tolerance.
Classification classify(const PerforatedDomain& dom, const Point2& x, double boundary_tol);

/// Ratio of the shorter boundary arc between a and b to |a-b|, for two points
/// on the boundary of the hole centered at the origin.
double boundary_arc_ratio(const HoleShape& hole, double eta, const Point2& a, const Point2& b);

/// Point on the boundary of eta*D at arclength fraction u in [0,1).
Point2 boundary_point(const HoleShape& hole, double eta, double u);

/// Max over n_pairs random boundary pairs of arc/chord: an empirical lower
/// estimate of the boundary detour constant.
double boundary_detour_ratio(const PerforatedDomain& dom, int n_pairs, std::uint64_t seed);

std::string to_string(HoleShape::Kind kind);
std::string to_string(DefectSpec::Kind kind);

}  // namespace hjperf
