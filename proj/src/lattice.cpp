#include "hjperf/lattice.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <ostream>
#include <sstream>

namespace hjperf {

namespace {

constexpr double kDepthTol = 1e-12;
constexpr long kMaxNodes = 40'000'000;

int pos_mod(int a, int n) {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

bool inside_open_hole(const PerforatedDomain& dom, const Point2& x) {
  return dom.depth(x) > kDepthTol;
}

int checked_inverse(double h, const char* where) {
  if (!(h > 0.0)) throw ConfigError(where, "h must be positive");
  const double inv = 1.0 / h;
  const long n = std::lround(inv);
  if (n < 1 || std::abs(inv - static_cast<double>(n)) > 1e-9 * inv)
    throw ConfigError(where, "1/h must be an integer (got h=" + std::to_string(h) + ")");
  return static_cast<int>(n);
}

void check_resolution(const PerforatedDomain& dom, double h, double dt, double M0,
                      const char* where) {
  dom.validate();
  const double feature = dom.feature_size();
  if (h > feature / 4.0 + 1e-12) {
    std::ostringstream os;
    os << "unresolved hole: h=" << h << " exceeds feature/4=" << feature / 4.0;
    throw ConfigError(where, os.str());
  }
  if (!(dt > 0.0)) throw ConfigError(where, "dt must be positive");
  if (!(M0 > 0.0)) throw ConfigError(where, "M0 must be positive");
  if (dt * M0 < 2.0 * h - 1e-12)
    throw ConfigError(where, "unreachable dt: dt*M0 must be >= 2h");
}

std::vector<IVec2> make_stencil(double h, double dt, double M0, int& radius) {
  const double reach = M0 * dt / h;
  radius = static_cast<int>(std::floor(reach + 1e-9));
  std::vector<IVec2> out;
  const double r2 = reach * reach + 1e-9;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= r2) out.emplace_back(dx, dy);
  return out;
}

// Step masks of the defect-free periodic domain, one row per residue class.
std::vector<std::uint64_t> residue_masks(const PerforatedDomain& periodic, int n,
                                         const std::vector<IVec2>& stencil, int words) {
  std::vector<std::uint64_t> table(static_cast<std::size_t>(n) * n * words, 0);
  const double inv = 1.0 / n;
  for (int rj = 0; rj < n; ++rj)
    for (int ri = 0; ri < n; ++ri) {
      const Point2 z(ri * inv, rj * inv);
      if (inside_open_hole(periodic, z)) continue;
      std::uint64_t* row = &table[(static_cast<std::size_t>(rj) * n + ri) * words];
      for (std::size_t s = 0; s < stencil.size(); ++s) {
        const Point2 a((ri - stencil[s].x()) * inv, (rj - stencil[s].y()) * inv);
        if (segment_clear(periodic, a, z)) row[s >> 6] |= std::uint64_t{1} << (s & 63);
      }
    }
  return table;
}

bool near_defect(const PerforatedDomain& dom, const Point2& x, double reach) {
  const IVec2 lo = cell_of(Point2(x.x() - reach, x.y() - reach));
  const IVec2 hi = cell_of(Point2(x.x() + reach, x.y() + reach));
  for (int j = lo.y(); j <= hi.y(); ++j)
    for (int i = lo.x(); i <= hi.x(); ++i)
      if (dom.defects.contains(IVec2(i, j))) return true;
  return false;
}

void fill_flags(SpaceTimeLattice& lat) {
  lat.flags.assign(lat.size(), 0);
  const double tol = lat.h / 2.0;
  for (int idx = 0; idx < lat.size(); ++idx) {
    const double d = lat.domain.depth(lat.point(idx));
    if (d > kDepthTol) continue;
    lat.flags[idx] = SpaceTimeLattice::kAdmissible;
    if (std::isfinite(d) && std::abs(d) <= tol) lat.flags[idx] |= SpaceTimeLattice::kBoundary;
  }
}

}  // namespace

int SpaceTimeLattice::index(const IVec2& g) const {
  if (topology == Topology::Torus) return pos_mod(g.y(), n) * n + pos_mod(g.x(), n);
  const int i = g.x() - i0, j = g.y() - j0;
  if (i < 0 || j < 0 || i >= nx || j >= ny) return -1;
  return j * nx + i;
}

int SpaceTimeLattice::residue(int idx) const {
  const IVec2 g = global(idx);
  return pos_mod(g.y(), n) * n + pos_mod(g.x(), n);
}

int SpaceTimeLattice::nearest_node(const Point2& x) const {
  return index(IVec2(static_cast<int>(std::lround(x.x() * n)),
                     static_cast<int>(std::lround(x.y() * n))));
}

int SpaceTimeLattice::nearest_admissible(const Point2& x, double radius) const {
  const int gi0 = static_cast<int>(std::floor((x.x() - radius) * n));
  const int gi1 = static_cast<int>(std::ceil((x.x() + radius) * n));
  const int gj0 = static_cast<int>(std::floor((x.y() - radius) * n));
  const int gj1 = static_cast<int>(std::ceil((x.y() + radius) * n));
  int best = -1;
  double best_d = kInf;
  for (int gj = gj0; gj <= gj1; ++gj)
    for (int gi = gi0; gi <= gi1; ++gi) {
      const int idx = index(IVec2(gi, gj));
      if (idx < 0 || !admissible(idx)) continue;
      const double d = (Point2(gi, gj) / n - x).norm();
      if (d > radius + 1e-12) continue;
      if (best < 0 || d < best_d - 1e-12 || (d <= best_d + 1e-12 && idx < best)) {
        best = idx;
        best_d = d;
      }
    }
  return best;
}

std::vector<int> SpaceTimeLattice::anchors(const Point2& x) const {
  constexpr double tol = 1e-12;
  const int gi0 = static_cast<int>(std::ceil((x.x() - 0.5 - tol) * n));
  const int gi1 = static_cast<int>(std::floor((x.x() + 0.5 + tol) * n));
  const int gj0 = static_cast<int>(std::ceil((x.y() - 0.5 - tol) * n));
  const int gj1 = static_cast<int>(std::floor((x.y() + 0.5 + tol) * n));
  std::vector<int> out;
  for (int gj = gj0; gj <= gj1; ++gj)
    for (int gi = gi0; gi <= gi1; ++gi) {
      const int idx = index(IVec2(gi, gj));
      if (idx >= 0 && boundary(idx)) out.push_back(idx);
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

long SpaceTimeLattice::admissible_count() const {
  return std::count_if(flags.begin(), flags.end(), [](std::uint8_t f) { return f & kAdmissible; });
}

long SpaceTimeLattice::boundary_count() const {
  return std::count_if(flags.begin(), flags.end(), [](std::uint8_t f) { return f & kBoundary; });
}

bool segment_clear(const PerforatedDomain& dom, const Point2& a, const Point2& b) {
  if (inside_open_hole(dom, a) || inside_open_hole(dom, b)) return false;
  for (int k = 1; k <= 4; ++k)
    if (inside_open_hole(dom, a + (b - a) * (k / 5.0))) return false;
  return true;
}

SpaceTimeLattice build_lattice(const PerforatedDomain& dom, double h, const LatticeBox& box,
                               double dt, double M0) {
  const char* where = "geometry.build_lattice";
  const int n = checked_inverse(h, where);
  check_resolution(dom, h, dt, M0, where);

  SpaceTimeLattice lat;
  lat.topology = Topology::Box;
  lat.domain = dom;
  lat.h = h;
  lat.dt = dt;
  lat.M0 = M0;
  lat.n = n;
  lat.i0 = static_cast<int>(std::ceil(box.lo.x() * n - 1e-9));
  lat.j0 = static_cast<int>(std::ceil(box.lo.y() * n - 1e-9));
  const int i1 = static_cast<int>(std::floor(box.hi.x() * n + 1e-9));
  const int j1 = static_cast<int>(std::floor(box.hi.y() * n + 1e-9));
  if (i1 < lat.i0 || j1 < lat.j0) throw ConfigError(where, "empty bounding box");
  lat.nx = i1 - lat.i0 + 1;
  lat.ny = j1 - lat.j0 + 1;
  if (static_cast<long>(lat.nx) * lat.ny > kMaxNodes)
    throw ConfigError(where, "lattice too large (" + std::to_string(long(lat.nx) * lat.ny) +
                                 " nodes)");

  lat.stencil = make_stencil(h, dt, M0, lat.stencil_radius);
  lat.mask_words = (lat.stencil_size() + 63) / 64;
  fill_flags(lat);

  const PerforatedDomain periodic = dom.without_defects();
  const std::vector<std::uint64_t> table = residue_masks(periodic, n, lat.stencil, lat.mask_words);
  const int W = lat.mask_words, S = lat.stencil_size(), R = lat.stencil_radius;
  const double reach = (R + 1.0) / n;
  lat.step_mask.assign(static_cast<std::size_t>(lat.size()) * W, 0);
  for (int idx = 0; idx < lat.size(); ++idx) {
    if (!lat.admissible(idx)) continue;
    const IVec2 g = lat.global(idx);
    std::uint64_t* row = &lat.step_mask[static_cast<std::size_t>(idx) * W];
    const Point2 z = lat.point(idx);
    if (!dom.defects.empty() && near_defect(dom, z, reach)) {
      for (int s = 0; s < S; ++s) {
        const int pred = lat.index(g - lat.stencil[s]);
        if (pred < 0 || !lat.admissible(pred)) continue;
        if (segment_clear(dom, lat.point(pred), z)) row[s >> 6] |= std::uint64_t{1} << (s & 63);
      }
      continue;
    }
    const std::uint64_t* src = &table[static_cast<std::size_t>(lat.residue(idx)) * W];
    std::copy(src, src + W, row);
    const int i = g.x() - lat.i0, j = g.y() - lat.j0;
    if (i >= R && j >= R && i < lat.nx - R && j < lat.ny - R) continue;
    for (int s = 0; s < S; ++s)
      if (lat.index(g - lat.stencil[s]) < 0) row[s >> 6] &= ~(std::uint64_t{1} << (s & 63));
  }
  return lat;
}

SpaceTimeLattice build_periodic_cell(const PerforatedDomain& dom, double h, double dt, double M0) {
  const char* where = "geometry.build_periodic_cell";
  if (!dom.is_periodic()) throw ConfigError(where, "a periodic cell needs a defect-free domain");
  const int n = checked_inverse(h, where);
  check_resolution(dom, h, dt, M0, where);

  SpaceTimeLattice lat;
  lat.topology = Topology::Torus;
  lat.domain = dom;
  lat.h = h;
  lat.dt = dt;
  lat.M0 = M0;
  lat.n = n;
  lat.nx = lat.ny = n;
  lat.stencil = make_stencil(h, dt, M0, lat.stencil_radius);
  lat.mask_words = (lat.stencil_size() + 63) / 64;
  fill_flags(lat);
  // On the torus the node index is the residue class.
  lat.step_mask = residue_masks(dom, n, lat.stencil, lat.mask_words);
  return lat;
}

void write_lattice_csv(const SpaceTimeLattice& lat, std::ostream& os) {
  os << "x,y,admissible,boundary\n";
  char buf[96];
  for (int idx = 0; idx < lat.size(); ++idx) {
    const Point2 p = lat.point(idx);
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%d,%d\n", p.x(), p.y(), lat.admissible(idx) ? 1 : 0,
                  lat.boundary(idx) ? 1 : 0);
    os << buf;
  }
}

}  // namespace hjperf
