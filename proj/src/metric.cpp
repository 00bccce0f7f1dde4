#include "hjperf/metric.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace hjperf {

namespace {

int pos_mod(int a, int n) {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

struct Window {
  int i0 = 0, j0 = 0, i1 = -1, j1 = -1;
  bool empty() const { return i1 < i0 || j1 < j0; }
};

Window finite_window(const SpaceTimeLattice& lat, const std::vector<double>& v) {
  Window w{lat.nx, lat.ny, -1, -1};
  for (int j = 0; j < lat.ny; ++j)
    for (int i = 0; i < lat.nx; ++i)
      if (std::isfinite(v[j * lat.nx + i])) {
        w.i0 = std::min(w.i0, i);
        w.j0 = std::min(w.j0, j);
        w.i1 = std::max(w.i1, i);
        w.j1 = std::max(w.j1, j);
      }
  return w;
}

// One update over the window. PredFn maps (node, stencil entry) to the
// predecessor index, which the step mask guarantees to exist.
template <typename PredFn>
void relax(const SpaceTimeLattice& lat, const StepCosts& costs, const Window& win,
           const std::vector<int>& res_x, const std::vector<int>& res_y, const double* old,
           double* next, std::uint8_t* parent, PredFn pred_of) {
  const int S = lat.stencil_size(), W = lat.mask_words;
  const double* table = costs.table.data();
  for (int j = win.j0; j <= win.j1; ++j) {
    const int ry = res_y[j];
    for (int i = win.i0; i <= win.i1; ++i) {
      const int z = j * lat.nx + i;
      if (!(lat.flags[z] & SpaceTimeLattice::kAdmissible)) {
        next[z] = kInf;
        continue;
      }
      const double* row = table + static_cast<std::size_t>(ry + res_x[i]) * S;
      const std::uint64_t* mask = &lat.step_mask[static_cast<std::size_t>(z) * W];
      double best = kInf;
      int best_pred = -1, best_s = CostField::kNoParent;
      for (int w = 0; w < W; ++w) {
        std::uint64_t bits = mask[w];
        while (bits) {
          const int s = (w << 6) + __builtin_ctzll(bits);
          bits &= bits - 1;
          const int p = pred_of(z, s);
          const double v = old[p];
          if (v == kInf) continue;
          const double c = v + row[s];
          if (c < best || (c == best && p < best_pred)) {
            best = c;
            best_pred = p;
            best_s = s;
          }
        }
      }
      next[z] = best;
      if (parent) parent[z] = static_cast<std::uint8_t>(best_s);
    }
  }
}

}  // namespace

StepCosts make_step_costs(const SpaceTimeLattice& lat, const HamiltonianModel& model,
                          const Point2& tilt, double scale) {
  StepCosts out;
  const int n = lat.n, S = lat.stencil_size();
  out.stencil_size = S;
  out.table.resize(static_cast<std::size_t>(n) * n * S);
  for (int rj = 0; rj < n; ++rj)
    for (int ri = 0; ri < n; ++ri)
      for (int s = 0; s < S; ++s) {
        const Point2 d = lat.stencil[s].cast<double>() * lat.h;
        const Point2 mid = Point2(ri, rj) / n - d / 2.0;
        const double c = lat.dt * eval_L<double>(model, mid, d / lat.dt) - tilt.dot(d);
        out.table[(static_cast<std::size_t>(rj) * n + ri) * S + s] = scale * c;
      }
  return out;
}

const std::vector<double>& CostField::slice(int step) const {
  auto it = slices.find(step);
  if (it == slices.end())
    throw ConfigError("metric.cost_field", "slice " + std::to_string(step) + " was not kept");
  return it->second;
}

int steps_for(double t, double dt, const char* where) {
  if (!(t >= 0.0)) throw ConfigError(where, "time must be >= 0");
  const long k = std::lround(t / dt);
  if (std::abs(k * dt - t) > 1e-9 * std::max(1.0, t))
    throw ConfigError(where, "time " + std::to_string(t) + " is not a multiple of dt");
  return static_cast<int>(k);
}

CostField propagate(LatticePtr lattice, const StepCosts& costs, std::vector<double> initial,
                    int steps, const std::vector<int>& keep, bool record_parents) {
  const SpaceTimeLattice& lat = *lattice;
  const int N = lat.size(), S = lat.stencil_size();
  if (static_cast<int>(initial.size()) != N)
    throw ConfigError("metric.propagate", "initial data does not match the lattice");
  if (costs.stencil_size != S)
    throw ConfigError("metric.propagate", "step costs do not match the stencil");
  if (record_parents && S >= CostField::kNoParent)
    throw ConfigError("metric.propagate", "stencil too large to record parents");

  CostField field;
  field.lattice = lattice;
  field.steps = steps;

  std::vector<int> res_x(lat.nx), res_y(lat.ny);
  for (int i = 0; i < lat.nx; ++i) res_x[i] = pos_mod(lat.i0 + i, lat.n);
  for (int j = 0; j < lat.ny; ++j) res_y[j] = pos_mod(lat.j0 + j, lat.n) * lat.n;

  std::vector<int> torus_pred;
  std::vector<int> offset(S);
  if (lat.topology == Topology::Torus) {
    torus_pred.resize(static_cast<std::size_t>(N) * S);
    for (int z = 0; z < N; ++z)
      for (int s = 0; s < S; ++s) torus_pred[static_cast<std::size_t>(z) * S + s] = lat.predecessor(z, s);
  } else {
    for (int s = 0; s < S; ++s) offset[s] = lat.stencil[s].x() + lat.stencil[s].y() * lat.nx;
  }

  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  auto kept = [&](int k) {
    return k == 0 || k == steps || std::binary_search(keep_sorted.begin(), keep_sorted.end(), k);
  };

  std::vector<double> a = std::move(initial), b(N, kInf);
  if (kept(0)) field.slices[0] = a;
  Window win = lat.topology == Topology::Torus ? Window{0, 0, lat.nx - 1, lat.ny - 1}
                                               : finite_window(lat, a);
  const int R = lat.stencil_radius;
  if (record_parents) field.parents.reserve(steps);

  for (int k = 1; k <= steps; ++k) {
    if (!win.empty() && lat.topology == Topology::Box)
      win = {std::max(0, win.i0 - R), std::max(0, win.j0 - R), std::min(lat.nx - 1, win.i1 + R),
             std::min(lat.ny - 1, win.j1 + R)};
    std::uint8_t* parent = nullptr;
    if (record_parents) {
      field.parents.emplace_back(N, CostField::kNoParent);
      parent = field.parents.back().data();
    }
    if (!win.empty()) {
      if (lat.topology == Topology::Torus) {
        const int* tp = torus_pred.data();
        relax(lat, costs, win, res_x, res_y, a.data(), b.data(), parent,
              [tp, S](int z, int s) { return tp[static_cast<std::size_t>(z) * S + s]; });
      } else {
        const int* off = offset.data();
        relax(lat, costs, win, res_x, res_y, a.data(), b.data(), parent,
              [off](int z, int s) { return z - off[s]; });
      }
    }
    std::swap(a, b);
    if (kept(k)) field.slices[k] = a;
  }
  return field;
}

DiscretePath optimal_path(const CostField& field, int sink) {
  const char* where = "metric.optimal_path";
  const SpaceTimeLattice& lat = *field.lattice;
  if (static_cast<int>(field.parents.size()) != field.steps)
    throw ConfigError(where, "field was computed without parents");
  if (sink < 0 || sink >= lat.size()) throw ConfigError(where, "sink outside the lattice");
  const double total = field.value(field.steps, sink);
  if (!std::isfinite(total)) throw Unreachable(where, "sink has no finite value");

  DiscretePath path;
  std::vector<int> nodes{sink};
  int z = sink;
  for (int k = field.steps; k >= 1; --k) {
    const std::uint8_t s = field.parents[k - 1][z];
    if (s == CostField::kNoParent) throw Unreachable(where, "broken backtrace");
    z = lat.predecessor(z, s);
    nodes.push_back(z);
  }
  std::reverse(nodes.begin(), nodes.end());
  // Unwrap torus coordinates so the path is continuous in the plane.
  Point2 prev = lat.point(nodes.front());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    Point2 p = lat.point(nodes[k]);
    if (lat.topology == Topology::Torus && k > 0) {
      p.x() -= std::round(p.x() - prev.x());
      p.y() -= std::round(p.y() - prev.y());
    }
    path.times.push_back(k * lat.dt);
    path.points.push_back(p);
    prev = p;
  }
  path.total_action = total - field.value(0, nodes.front());
  return path;
}

CostField source_field(LatticePtr lat, const HamiltonianModel& model, const std::vector<int>& sources,
                       int steps, const std::vector<int>& keep, bool record_parents) {
  std::vector<double> init(lat->size(), kInf);
  for (int s : sources) {
    if (s < 0 || !lat->admissible(s))
      throw Unreachable("metric.source_field", "source is not an admissible node");
    init[s] = 0.0;
  }
  return propagate(lat, make_step_costs(*lat, model), std::move(init), steps, keep, record_parents);
}

namespace {

int snapped_node(const SpaceTimeLattice& lat, const Point2& x, const char* where) {
  const int idx = lat.nearest_node(x);
  if (idx < 0) throw ConfigError(where, "point outside the lattice box");
  if (!lat.admissible(idx)) throw Unreachable(where, "point does not snap to an admissible node");
  return idx;
}

}  // namespace

double cost_m(LatticePtr lat, const HamiltonianModel& model, double t, const Point2& x,
              const Point2& y) {
  const char* where = "metric.cost_m";
  const int sx = snapped_node(*lat, x, where), sy = snapped_node(*lat, y, where);
  const CostField f = source_field(lat, model, {sx}, steps_for(t, lat->dt, where));
  const double v = f.final_slice()[sy];
  if (!std::isfinite(v)) throw Unreachable(where, "no admissible discrete path");
  return v;
}

double cost_md(LatticePtr lat, const HamiltonianModel& model, double t, const Point2& x,
               const Point2& y) {
  return cost_m(std::move(lat), model, t, x, y);
}

double cost_mstar(LatticePtr lat, const HamiltonianModel& model, double t, const Point2& x,
                  const Point2& y) {
  const char* where = "metric.cost_mstar";
  if (!lat->domain.is_periodic()) throw ConfigError(where, "m* needs a defect-free domain");
  const std::vector<int> src = lat->anchors(x), dst = lat->anchors(y);
  if (src.empty()) throw NoAnchor(where, "no boundary node in the cell around x");
  if (dst.empty()) throw NoAnchor(where, "no boundary node in the cell around y");
  const CostField f = source_field(lat, model, src, steps_for(t, lat->dt, where));
  double best = kInf;
  for (int z : dst) best = std::min(best, f.final_slice()[z]);
  if (!std::isfinite(best)) throw Unreachable(where, "no admissible discrete path");
  return best;
}

Extrapolation fit_inverse_k(const std::vector<int>& k_list, const std::vector<double>& a) {
  const char* where = "effective.fit_inverse_k";
  if (k_list.size() != a.size() || k_list.size() < 2)
    throw ConfigError(where, "need at least two (k, a_k) pairs");
  const int K = static_cast<int>(k_list.size());
  Eigen::MatrixXd X(K, 2);
  Eigen::VectorXd rhs(K);
  for (int i = 0; i < K; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = 1.0 / k_list[i];
    rhs(i) = a[i];
  }
  const Eigen::Vector2d c = X.colPivHouseholderQr().solve(rhs);
  Extrapolation out;
  out.value = c(0);
  out.slope = c(1);
  out.residual = std::sqrt((X * c - rhs).squaredNorm() / K);
  return out;
}

LbarSampler::LbarSampler(const PerforatedDomain& dom, const HamiltonianModel& model,
                         const SamplerSpec& spec)
    : spec_(spec) {
  const char* where = "effective.lbar_sampler";
  if (!dom.is_periodic()) throw ConfigError(where, "the sampler needs a defect-free domain");
  if (spec_.k_list.size() < 3) throw ConfigError(where, "k_list needs at least 3 entries");
  for (std::size_t i = 0; i < spec_.k_list.size(); ++i)
    if (spec_.k_list[i] < 1 || (i > 0 && spec_.k_list[i] <= spec_.k_list[i - 1]))
      throw ConfigError(where, "k_list must be positive and strictly increasing");
  if (!(spec_.t > 0.0)) throw ConfigError(where, "t must be positive");
  if (!(spec_.v_radius > 0.0)) throw ConfigError(where, "v_radius must be positive");
  if (spec_.dt <= 0.0) spec_.dt = spec_.h;
  if (spec_.v_radius > model.M0 + 1e-12)
    throw ConfigError(where, "v_radius exceeds the speed bound M0");

  const double half = spec_.k_list.back() * spec_.t * spec_.v_radius + 0.5 + spec_.margin;
  lat_ = std::make_shared<const SpaceTimeLattice>(
      build_lattice(dom, spec_.h, {Point2(-half, -half), Point2(half, half)}, spec_.dt, model.M0));

  point_anchor_ = !dom.has_holes();
  std::vector<int> sources;
  if (point_anchor_) {
    sources.push_back(lat_->nearest_node(Point2::Zero()));
  } else {
    sources = lat_->anchors(Point2::Zero());
    if (sources.empty()) throw NoAnchor(where, "no boundary node in the cell around 0");
  }
  for (int k : spec_.k_list) step_of_k_.push_back(steps_for(k * spec_.t, spec_.dt, where));
  field_ = source_field(lat_, model, sources, step_of_k_.back(), step_of_k_);
}

bool LbarSampler::covers(const Point2& y) const {
  if (y.norm() > spec_.v_radius * spec_.t + 1e-9) return false;
  const double half = spec_.k_list.back() * spec_.t * spec_.v_radius + 0.5 + spec_.margin;
  return spec_.k_list.back() * y.cwiseAbs().maxCoeff() + 0.5 <= half + 1e-9;
}

LbarSampler::Estimate LbarSampler::mbar(const Point2& y) const {
  const char* where = "effective.mbar_star";
  if (!covers(y)) throw ConfigError(where, "displacement outside the sampler coverage");
  Estimate est;
  for (std::size_t i = 0; i < spec_.k_list.size(); ++i) {
    const int k = spec_.k_list[i];
    const std::vector<double>& f = field_.slice(step_of_k_[i]);
    const Point2 target = k * y;
    double best = kInf;
    if (point_anchor_) {
      const int z = lat_->nearest_node(target);
      if (z >= 0) best = f[z];
    } else {
      const std::vector<int> sinks = lat_->anchors(target);
      if (sinks.empty()) throw NoAnchor(where, "no boundary node in the cell around k y");
      for (int z : sinks) best = std::min(best, f[z]);
    }
    if (!std::isfinite(best)) throw Unreachable(where, "sink not reached");
    est.a_k.push_back(best / k);
  }
  const Extrapolation fit = fit_inverse_k(spec_.k_list, est.a_k);
  est.value = fit.value;
  est.residual = fit.residual;
  return est;
}

LbarSampler::Estimate LbarSampler::lbar(const Point2& v) const {
  Estimate e = mbar(spec_.t * v);
  e.value /= spec_.t;
  e.residual /= spec_.t;
  for (double& a : e.a_k) a /= spec_.t;
  return e;
}

void write_cost_field_csv(const CostField& field, std::ostream& os) {
  os << "t,x,y,value\n";
  char buf[128];
  const SpaceTimeLattice& lat = *field.lattice;
  for (const auto& [step, values] : field.slices)
    for (int z = 0; z < lat.size(); ++z) {
      if (!std::isfinite(values[z])) continue;
      const Point2 p = lat.point(z);
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", step * lat.dt, p.x(), p.y(),
                    values[z]);
      os << buf;
    }
}

void write_path_csv(const DiscretePath& path, std::ostream& os) {
  os << "s,x,y\n";
  char buf[96];
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", path.times[k], path.points[k].x(),
                  path.points[k].y());
    os << buf;
  }
}

}  // namespace hjperf
