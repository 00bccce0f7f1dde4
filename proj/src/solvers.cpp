#include "hjperf/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>

namespace hjperf {

std::string to_string(DomainTag tag) {
  switch (tag) {
    case DomainTag::OmegaEps: return "Omega_eps";
    case DomainTag::WholeSpace: return "WholeSpace";
    case DomainTag::WEps: return "W_eps";
  }
  return "?";
}

int ValueField::step_of(double t) const {
  return steps_for(t / epsilon, lattice().dt, "solvers.value_field");
}

double ValueField::value(int step, int node) const {
  const double v = field.value(step, node);
  if (!reduced() || !std::isfinite(v)) return v;
  return g(position(node)) + v;
}

Point2 ValueField::snap(const Point2& x) const {
  const int n = lattice().n;
  const double gi = std::round(x.x() / epsilon * n), gj = std::round(x.y() / epsilon * n);
  return epsilon * Point2(gi / n, gj / n);
}

Point2 ValueField::snap_admissible(const Point2& x, double fast_radius) const {
  const SpaceTimeLattice& lat = lattice();
  const Point2 X = x / epsilon;
  const int idx = lat.nearest_admissible(X, fast_radius);
  if (idx < 0) throw Unreachable("solvers.snap_admissible", "no admissible node near the probe");
  Point2 rep = lat.point(idx);
  if (reduced()) rep += (X - rep).array().round().matrix();
  return epsilon * rep;
}

double ValueField::at(const Point2& x, double t) const {
  const SpaceTimeLattice& lat = lattice();
  const IVec2 gnode(static_cast<int>(std::lround(x.x() / epsilon * lat.n)),
                    static_cast<int>(std::lround(x.y() / epsilon * lat.n)));
  const int idx = lat.index(gnode);
  if (idx < 0) return kInf;
  const double v = field.value(step_of(t), idx);
  if (!reduced() || !std::isfinite(v)) return v;
  return g(snap(x)) + v;
}

namespace {

ValueField solve(DomainTag tag, LatticePtr lat, const HamiltonianModel& model,
                 const InitialData& g, double epsilon, double T,
                 const std::vector<double>& snapshot_times, const char* where) {
  if (!(epsilon > 0.0)) throw ConfigError(where, "epsilon must be positive");
  if (!(T >= 0.0)) throw ConfigError(where, "T must be >= 0");
  const bool torus = lat->topology == Topology::Torus;
  const int steps = steps_for(T / epsilon, lat->dt, where);
  std::vector<int> keep;
  for (double t : snapshot_times) {
    if (t < 0.0 || t > T + 1e-12) throw ConfigError(where, "snapshot time outside [0, T]");
    keep.push_back(steps_for(t / epsilon, lat->dt, where));
  }

  std::vector<double> init(lat->size(), kInf);
  for (int z = 0; z < lat->size(); ++z)
    if (lat->admissible(z)) init[z] = torus ? 0.0 : g(epsilon * lat->point(z));

  const StepCosts costs = make_step_costs(*lat, model, torus ? g.p : Point2::Zero(), epsilon);
  ValueField u;
  u.tag = tag;
  u.epsilon = epsilon;
  u.g = g;
  u.field = propagate(std::move(lat), costs, std::move(init), steps, keep);
  return u;
}

}  // namespace

ValueField solve_ueps(LatticePtr lat, const HamiltonianModel& model, const InitialData& g,
                      double epsilon, double T, const std::vector<double>& snapshot_times) {
  const char* where = "solvers.solve_ueps";
  if (!lat->domain.is_periodic()) throw ConfigError(where, "Omega_eps has no defects; use solve_weps");
  return solve(DomainTag::OmegaEps, std::move(lat), model, g, epsilon, T, snapshot_times, where);
}

ValueField solve_tilde_ueps(LatticePtr lat, const HamiltonianModel& model, const InitialData& g,
                            double epsilon, double T, const std::vector<double>& snapshot_times) {
  const char* where = "solvers.solve_tilde_ueps";
  if (lat->domain.has_holes()) throw ConfigError(where, "the whole-space problem needs a hole-free lattice");
  return solve(DomainTag::WholeSpace, std::move(lat), model, g, epsilon, T, snapshot_times, where);
}

ValueField solve_weps(LatticePtr lat, const HamiltonianModel& model, const InitialData& g,
                      double epsilon, double T, const std::vector<double>& snapshot_times) {
  return solve(DomainTag::WEps, std::move(lat), model, g, epsilon, T, snapshot_times,
               "solvers.solve_weps");
}

EffectiveModel EffectiveModel::quadratic() {
  return {[](const Point2& p) { return p.squaredNorm() / 2.0; },
          [](const Point2& v) { return v.squaredNorm() / 2.0; }};
}

EffectiveModel EffectiveModel::from_grid(const LbarGrid& grid, const HamiltonianModel& model) {
  auto shared = std::make_shared<const LbarGrid>(grid);
  const HamiltonianModel m = model;
  EffectiveModel out;
  out.hbar = [shared, m](const Point2& p) { return effective_hamiltonian_metric(*shared, m, p).value; };
  out.lbar = [shared](const Point2& v) {
    const double s = shared->step;
    for (std::size_t i = 0; i < shared->v.size(); ++i)
      if ((shared->v[i] - v).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, s)) return shared->value[i];
    return kInf;
  };
  return out;
}

double hopf_lax(const EffectiveModel& eff, const InitialData& g, const Point2& x, double t,
                double radius, double y_step) {
  const char* where = "solvers.hopf_lax";
  if (t < 0.0) throw ConfigError(where, "t must be >= 0");
  if (t == 0.0) return g(x);
  if (eff.hbar) return g(x) - t * eff.hbar(g.p);
  if (!eff.lbar) throw ConfigError(where, "effective model has neither H-bar nor L-bar");
  if (!(y_step > 0.0)) throw ConfigError(where, "y_step must be positive");
  const int R = static_cast<int>(std::floor(radius / y_step + 1e-9));
  double best = kInf, best_r = kInf;
  for (int j = -R; j <= R; ++j)
    for (int i = -R; i <= R; ++i) {
      const Point2 d(i * y_step, j * y_step);
      const double r = d.norm();
      if (r > radius + 1e-12) continue;
      const Point2 y = x - d;
      const double c = t * eff.lbar(d / t) + g(y);
      if (c < best || (c == best && r < best_r)) {
        best = c;
        best_r = r;
      }
    }
  return best;
}

double ubar_from_mbar(const LbarSampler& sampler, const InitialData& g, const Point2& x, double t,
                      double y_step) {
  const char* where = "solvers.ubar_from_mbar";
  if (std::abs(sampler.spec().t - t) > 1e-12)
    throw ConfigError(where, "sampler time differs from t");
  const double step = y_step > 0.0 ? y_step : t * default_v_step(sampler.spec().k_list);
  const double radius = sampler.spec().v_radius * t;
  const int R = static_cast<int>(std::floor(radius / step + 1e-9));
  double best = kInf, best_r = kInf;
  for (int j = -R; j <= R; ++j)
    for (int i = -R; i <= R; ++i) {
      const Point2 d(i * step, j * step);
      if (!sampler.covers(d)) continue;
      double m;
      try {
        m = sampler.mbar(d).value;
      } catch (const NumericalError&) {
        continue;
      }
      const double c = m + g(x - d);
      const double r = d.norm();
      if (c < best || (c == best && r < best_r)) {
        best = c;
        best_r = r;
      }
    }
  if (!std::isfinite(best)) throw Unreachable(where, "no covered displacement");
  return best;
}

void write_value_field_csv(const ValueField& u, std::ostream& os) {
  os << "t,x,y,value\n";
  char buf[128];
  for (const auto& [step, values] : u.field.slices)
    for (int z = 0; z < u.lattice().size(); ++z) {
      if (!std::isfinite(values[z])) continue;
      const Point2 x = u.position(z);
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", step * u.dt(), x.x(), x.y(),
                    u.value(step, z));
      os << buf;
    }
}

}  // namespace hjperf
