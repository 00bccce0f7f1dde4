#include "hjperf/effective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace hjperf {

namespace {

void check_k_list(const std::vector<int>& k_list, const char* where) {
  if (k_list.size() < 3) throw ConfigError(where, "k_list needs at least 3 entries");
  for (std::size_t i = 0; i < k_list.size(); ++i)
    if (k_list[i] < 1 || (i > 0 && k_list[i] <= k_list[i - 1]))
      throw ConfigError(where, "k_list must be positive and strictly increasing");
}

}  // namespace

MbarResult mbar_star(const PerforatedDomain& dom, const HamiltonianModel& model, double t,
                     const Point2& x, const Point2& y, const std::vector<int>& k_list, double h,
                     double margin) {
  const char* where = "effective.mbar_star";
  check_k_list(k_list, where);
  if (!(t > 0.0)) throw ConfigError(where, "t must be positive");
  if (!dom.is_periodic()) throw ConfigError(where, "m-bar* needs a defect-free domain");
  MbarResult out;
  for (int k : k_list) {
    const Point2 X = k * x, Y = k * y;
    const Point2 pad = Point2::Constant(0.5 + margin);
    const LatticeBox box{X.cwiseMin(Y) - pad, X.cwiseMax(Y) + pad};
    auto lat = std::make_shared<const SpaceTimeLattice>(build_lattice(dom, h, box, h, model.M0));
    const double m = dom.has_holes() ? cost_mstar(lat, model, k * t, X, Y)
                                     : cost_m(lat, model, k * t, lat->point(lat->nearest_node(X)),
                                              lat->point(lat->nearest_node(Y)));
    out.a_k.push_back(m / k);
  }
  const Extrapolation fit = fit_inverse_k(k_list, out.a_k);
  out.value = fit.value;
  out.residual = fit.residual;
  return out;
}

double effective_lagrangian(const PerforatedDomain& dom, const HamiltonianModel& model,
                            const Point2& v, const std::vector<int>& k_list, double h) {
  if (v.norm() > model.M0 + 1e-12)
    throw ConfigError("effective.effective_lagrangian", "|v| exceeds M0");
  return mbar_star(dom, model, 1.0, Point2::Zero(), v, k_list, h).value;
}

double default_v_step(const std::vector<int>& k_list) {
  int g = 0;
  for (int k : k_list) g = std::gcd(g, k);
  return 1.0 / std::max(g, 1);
}

LbarGrid tabulate_lbar(const LbarSampler& sampler, double v_step) {
  LbarGrid grid;
  grid.k_list = sampler.spec().k_list;
  grid.step = v_step > 0.0 ? v_step : default_v_step(grid.k_list);
  grid.radius = sampler.spec().v_radius;
  const double t = sampler.spec().t;
  const int R = static_cast<int>(std::floor(grid.radius / grid.step + 1e-9));
  for (int j = -R; j <= R; ++j)
    for (int i = -R; i <= R; ++i) {
      const Point2 v(i * grid.step, j * grid.step);
      if (!sampler.covers(t * v)) continue;
      LbarSampler::Estimate e;
      try {
        e = sampler.lbar(v);
      } catch (const NumericalError&) {
        continue;
      }
      grid.v.push_back(v);
      grid.value.push_back(e.value);
      grid.residual.push_back(e.residual);
    }
  return grid;
}

HbarEstimate effective_hamiltonian_metric(const LbarGrid& grid, const HamiltonianModel& model,
                                          const Point2& p) {
  HbarEstimate out;
  for (std::size_t i = 0; i < grid.v.size(); ++i) {
    const double c = p.dot(grid.v[i]) - grid.value[i];
    if (c > out.value) {
      out.value = c;
      out.argmax = grid.v[i];
      out.residual = grid.residual[i];
    }
  }
  if (grid.v.empty())
    throw Unreachable("effective.effective_hamiltonian_metric", "empty L-bar grid");
  const double pn = p.norm();
  if (grid.radius <= pn) {
    out.covered = false;
  } else {
    const double gap = grid.radius - pn;
    out.covered = pn * pn / 2.0 + model.K0 - gap * gap / 2.0 <= out.value + 1e-12;
  }
  return out;
}

HbarEstimate effective_hamiltonian_metric(const PerforatedDomain& dom,
                                          const HamiltonianModel& model, const Point2& p,
                                          const std::vector<int>& k_list, double h) {
  SamplerSpec spec;
  spec.h = h;
  spec.k_list = k_list;
  spec.v_radius = std::min(model.M0, 3.0);
  const LbarSampler sampler(dom, model, spec);
  return effective_hamiltonian_metric(tabulate_lbar(sampler), model, p);
}

CellResult effective_hamiltonian_cell(LatticePtr cell, const HamiltonianModel& model,
                                      const Point2& p, const std::vector<double>& lambda_list,
                                      double tol, long max_sweeps) {
  const char* where = "effective.effective_hamiltonian_cell";
  const SpaceTimeLattice& lat = *cell;
  if (lat.topology != Topology::Torus) throw ConfigError(where, "needs a periodic cell lattice");
  if (lambda_list.size() < 2) throw ConfigError(where, "lambda_list needs at least 2 entries");
  for (std::size_t i = 0; i < lambda_list.size(); ++i) {
    const double l = lambda_list[i];
    if (!(l > 0.0) || l * lat.dt >= 1.0 || (i > 0 && l >= lambda_list[i - 1]))
      throw ConfigError(where, "lambda_list must be positive, strictly decreasing, lambda dt < 1");
  }

  const int N = lat.size(), S = lat.stencil_size();
  const StepCosts costs = make_step_costs(lat, model, p);
  std::vector<int> pred(static_cast<std::size_t>(N) * S);
  for (int z = 0; z < N; ++z)
    for (int s = 0; s < S; ++s) pred[static_cast<std::size_t>(z) * S + s] = lat.predecessor(z, s);

  CellResult out;
  out.z0 = lat.nearest_admissible(Point2(0.5, 0.5), 0.5);
  if (out.z0 < 0) throw Unreachable(where, "no admissible reference node");

  std::vector<double> w(N, 0.0);
  double prev_lambda = 0.0;
  for (double lambda : lambda_list) {
    if (prev_lambda > 0.0)
      for (double& x : w) x *= prev_lambda / lambda;
    const double factor = 1.0 - lambda * lat.dt;
    const long cap = max_sweeps > 0 ? max_sweeps : static_cast<long>(std::ceil(1e6 / lambda));
    long sweep = 0;
    bool converged = false;
    while (sweep < cap) {
      double diff = 0.0;
      const bool forward = sweep % 2 == 0;
      for (int q = 0; q < N; ++q) {
        const int z = forward ? q : N - 1 - q;
        if (!lat.admissible(z)) continue;
        const std::uint64_t* mask = &lat.step_mask[static_cast<std::size_t>(z) * lat.mask_words];
        double best = kInf;
        for (int s = 0; s < S; ++s) {
          if (!((mask[s >> 6] >> (s & 63)) & 1u)) continue;
          best = std::min(best, factor * w[pred[static_cast<std::size_t>(z) * S + s]] + costs(z, s));
        }
        diff = std::max(diff, std::abs(best - w[z]));
        w[z] = best;
      }
      ++sweep;
      if (diff <= tol) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NonConvergence(where, "value iteration did not reach tolerance for lambda=" +
                                      std::to_string(lambda));
    out.lambdas.push_back(lambda);
    out.hbar_lambda.push_back(-lambda * w[out.z0] + 0.0);
    out.sweeps.push_back(static_cast<int>(sweep));
    prev_lambda = lambda;
  }

  const std::size_t m = out.lambdas.size();
  const double la = out.lambdas[m - 2], lb = out.lambdas[m - 1];
  const double ha = out.hbar_lambda[m - 2], hb = out.hbar_lambda[m - 1];
  out.value = hb - lb * (ha - hb) / (la - lb);

  out.corrector.assign(N, 0.0);
  for (int z = 0; z < N; ++z) out.corrector[z] = lat.admissible(z) ? w[z] - w[out.z0] : 0.0;
  return out;
}

double infsup_upper_bound(const SpaceTimeLattice& cell, const HamiltonianModel& model,
                          const Point2& p, const std::vector<double>& corrector) {
  const char* where = "effective.infsup_upper_bound";
  if (cell.topology != Topology::Torus) throw ConfigError(where, "needs a periodic cell lattice");
  if (static_cast<int>(corrector.size()) != cell.size())
    throw ConfigError(where, "corrector does not match the cell lattice");
  auto diff = [&](int z, const IVec2& e) {
    const IVec2 g = cell.global(z);
    const int a = cell.index(g + e), b = cell.index(g - e);
    const bool ha = cell.admissible(a), hb = cell.admissible(b);
    if (ha && hb) return (corrector[a] - corrector[b]) / (2.0 * cell.h);
    if (ha) return (corrector[a] - corrector[z]) / cell.h;
    if (hb) return (corrector[z] - corrector[b]) / cell.h;
    return 0.0;
  };
  double best = -kInf;
  for (int z = 0; z < cell.size(); ++z) {
    if (!cell.admissible(z)) continue;
    const Point2 grad(diff(z, IVec2(1, 0)), diff(z, IVec2(0, 1)));
    best = std::max(best, eval_H<double>(model, cell.point(z), p + grad));
  }
  return best;
}

void write_effective_csv(const EffectiveTable& table, std::ostream& os) {
  os << "kind,component1,component2,value,residual\n";
  char buf[160];
  for (const EffectiveRow& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%.12g,%.12g\n", r.kind.c_str(), r.component1,
                  r.component2, r.value, r.residual);
    os << buf;
  }
}

}  // namespace hjperf
