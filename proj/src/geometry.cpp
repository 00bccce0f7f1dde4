#include "hjperf/geometry.hpp"

#include "hjperf/random.hpp"

#include <algorithm>
#include <numbers>

namespace hjperf {

namespace {

bool lex_less(const IVec2& a, const IVec2& b) {
  return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
}

bool is_positive_square(long v) {
  if (v < 1) return false;
  long r = static_cast<long>(std::llround(std::sqrt(static_cast<double>(v))));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r * r == v;
}

// Arclength coordinate of a boundary point of the square [-s,s]^2, measured
// counterclockwise from the corner (-s,-s).
double square_perimeter_coord(const Point2& q, double s) {
  const double tol = 1e-9 * std::max(1.0, s);
  if (std::abs(q.y() + s) <= tol) return q.x() + s;                 // bottom
  if (std::abs(q.x() - s) <= tol) return 2.0 * s + (q.y() + s);     // right
  if (std::abs(q.y() - s) <= tol) return 4.0 * s + (s - q.x());     // top
  return 6.0 * s + (s - q.y());                                     // left
}

}  // namespace

DefectSpec DefectSpec::explicit_points(std::vector<IVec2> pts) {
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return {Kind::Explicit, std::move(pts)};
}

bool DefectSpec::contains(const IVec2& m) const {
  switch (kind) {
    case Kind::None:
      return false;
    case Kind::Singleton0:
      return m.x() == 0 && m.y() == 0;
    case Kind::LineE1:
      return m.y() == 0 && m.x() >= 0;
    case Kind::SquaresE1:
      return m.y() == 0 && is_positive_square(m.x());
    case Kind::Explicit:
      return std::binary_search(points.begin(), points.end(), m, lex_less);
  }
  return false;
}

DefectCount defect_count(const DefectSpec& defects, int k) {
  if (k < 1) throw ConfigError("geometry.defect_count", "k must be >= 1");
  long count = 0;
  switch (defects.kind) {
    case DefectSpec::Kind::None:
      break;
    case DefectSpec::Kind::Singleton0:
      count = 1;
      break;
    case DefectSpec::Kind::LineE1:
      count = static_cast<long>(k) + 1;
      break;
    case DefectSpec::Kind::SquaresE1: {
      long r = static_cast<long>(std::sqrt(static_cast<double>(k)));
      while (r * r > k) --r;
      while ((r + 1) * (r + 1) <= k) ++r;
      count = r;
      break;
    }
    case DefectSpec::Kind::Explicit:
      count = std::count_if(defects.points.begin(), defects.points.end(), [k](const IVec2& m) {
        return std::abs(m.x()) <= k && std::abs(m.y()) <= k;
      });
      break;
  }
  return {count, static_cast<double>(count) / k};
}

double PerforatedDomain::feature_size() const {
  if (hole.empty()) return 1.0;
  const double ext = eta * hole.extent();
  return std::min(ext, 1.0 - ext);
}

void PerforatedDomain::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("geometry.domain", "eta must lie in (0,1]");
  if (hole.empty()) return;
  if (!(hole.size > 0.0)) throw ConfigError("geometry.domain", "hole size must be positive");
  if (!(eta * hole.size < 0.5))
    throw ConfigError("geometry.domain", "hole closure must lie strictly inside the unit cell");
}

Classification classify(const PerforatedDomain& dom, const Point2& x, double boundary_tol) {
  Classification out;
  const double d = dom.depth(x);
  if (!std::isfinite(d)) return out;
  out.hole_cell = cell_of(x);
  if (std::abs(d) <= boundary_tol) {
    out.kind = Classification::Kind::Boundary;
  } else if (d > 0.0) {
    out.kind = Classification::Kind::Exterior;
  } else {
    out.kind = Classification::Kind::Interior;
    out.hole_cell = IVec2::Zero();
  }
  return out;
}

Point2 boundary_point(const HoleShape& hole, double eta, double u) {
  const double s = eta * hole.size;
  switch (hole.kind) {
    case HoleShape::Kind::None:
      throw ConfigError("geometry.boundary_point", "domain has no hole");
    case HoleShape::Kind::Disc: {
      const double th = 2.0 * std::numbers::pi * u;
      return Point2(s * std::cos(th), s * std::sin(th));
    }
    case HoleShape::Kind::Square: {
      double a = 8.0 * s * (u - std::floor(u));
      if (a < 2.0 * s) return Point2(-s + a, -s);
      a -= 2.0 * s;
      if (a < 2.0 * s) return Point2(s, -s + a);
      a -= 2.0 * s;
      if (a < 2.0 * s) return Point2(s - a, s);
      a -= 2.0 * s;
      return Point2(-s, s - a);
    }
  }
  return Point2::Zero();
}

double boundary_arc_ratio(const HoleShape& hole, double eta, const Point2& a, const Point2& b) {
  const double chord = (a - b).norm();
  if (!(chord > 0.0)) return 1.0;
  const double s = eta * hole.size;
  switch (hole.kind) {
    case HoleShape::Kind::None:
      throw ConfigError("geometry.boundary_arc_ratio", "domain has no hole");
    case HoleShape::Kind::Disc: {
      const double c = std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0);
      return s * std::acos(c) / chord;
    }
    case HoleShape::Kind::Square: {
      const double per = 8.0 * s;
      const double d = std::abs(square_perimeter_coord(a, s) - square_perimeter_coord(b, s));
      return std::min(d, per - d) / chord;
    }
  }
  return 1.0;
}

double boundary_detour_ratio(const PerforatedDomain& dom, int n_pairs, std::uint64_t seed) {
  if (!dom.has_holes()) throw ConfigError("geometry.boundary_detour_ratio", "domain has no hole");
  if (n_pairs < 1) throw ConfigError("geometry.boundary_detour_ratio", "n_pairs must be >= 1");
  Uniform01 uniform(seed);
  double worst = 1.0;
  for (int i = 0; i < n_pairs; ++i) {
    const Point2 a = boundary_point(dom.hole, dom.eta, uniform());
    const Point2 b = boundary_point(dom.hole, dom.eta, uniform());
    if ((a - b).norm() < 1e-12) continue;
    worst = std::max(worst, boundary_arc_ratio(dom.hole, dom.eta, a, b));
  }
  return worst;
}

std::string to_string(HoleShape::Kind kind) {
  switch (kind) {
    case HoleShape::Kind::None: return "none";
    case HoleShape::Kind::Disc: return "disc";
    case HoleShape::Kind::Square: return "square";
  }
  return "?";
}

std::string to_string(DefectSpec::Kind kind) {
  switch (kind) {
    case DefectSpec::Kind::None: return "none";
    case DefectSpec::Kind::Singleton0: return "singleton0";
    case DefectSpec::Kind::LineE1: return "line_e1";
    case DefectSpec::Kind::SquaresE1: return "squares_e1";
    case DefectSpec::Kind::Explicit: return "explicit";
  }
  return "?";
}

}  // namespace hjperf
