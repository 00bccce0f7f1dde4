#include "hjperf/experiments.hpp"
#include "hjperf/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace hjperf {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

LatticePtr box_lattice(const PerforatedDomain& dom, const LatticeBox& box, double h, double M0) {
  return std::make_shared<const SpaceTimeLattice>(build_lattice(dom, h, box, h, M0));
}

LatticePtr around(const PerforatedDomain& dom, const Point2& a, const Point2& b, double h, double M0) {
  const Point2 pad = Point2::Constant(2.0);
  return box_lattice(dom, LatticeBox{a.cwiseMin(b) - pad, a.cwiseMax(b) + pad}, h, M0);
}

// a <= b with +inf <= +inf allowed.
double excess(double a, double b) {
  if (a == b) return 0.0;
  return a - b;
}

Check dpp_identity(const HamiltonianModel& model, const PerforatedDomain& dom, double h) {
  auto lat = box_lattice(dom, LatticeBox::cells(-2, -2, 2, 2), h, model.M0);
  std::vector<double> init(lat->size(), kInf);
  for (int z = 0; z < lat->size(); ++z)
    if (lat->admissible(z)) init[z] = -lat->point(z).x();
  const StepCosts costs = make_step_costs(*lat, model);
  const int a = 7, b = 9;
  const CostField full = propagate(lat, costs, init, a + b);
  const CostField first = propagate(lat, costs, init, a);
  const CostField rest = propagate(lat, costs, first.final_slice(), b);
  double worst = 0.0;
  for (int z = 0; z < lat->size(); ++z) {
    const double x = full.final_slice()[z], y = rest.final_slice()[z];
    if (x != y) worst = std::max(worst, std::isfinite(x) && std::isfinite(y) ? std::abs(x - y) : kInf);
  }
  return {"dpp_identity", worst == 0.0, worst, 0.0, "split 7+9 steps against 16"};
}

Check hole_monotonicity(const HamiltonianModel& model, double h) {
  const PerforatedDomain doms[3] = {PerforatedDomain::whole_space(),
                                    {HoleShape::disc(0.15), 1.0, DefectSpec::none()},
                                    {HoleShape::disc(0.25), 1.0, DefectSpec::none()}};
  const LatticeBox box = LatticeBox::cells(-1, -1, 3, 2);
  const Point2 x(0.5, 0.5);
  double worst = -kInf;
  for (const Point2& y : {Point2(2.5, 0.5), Point2(2.5, 1.5), Point2(1.5, 1.5), Point2(-0.5, 1.5)})
    for (double t : {1.0, 2.0, 3.0}) {
      double prev = -kInf;
      for (const PerforatedDomain& d : doms) {
        const double m = cost_m(box_lattice(d, box, h, model.M0), model, t, x, y);
        worst = std::max(worst, excess(prev, m));
        prev = m;
      }
    }
  return {"hole_monotonicity", worst <= 0.0, worst, 0.0, "m(no hole) <= m(r=0.15) <= m(r=0.25)"};
}

Check sandwich(const HamiltonianModel& model, const char* name, double h) {
  const PerforatedDomain omega{HoleShape::disc(0.25), 1.0, DefectSpec::none()};
  const PerforatedDomain w{HoleShape::disc(0.25), 1.0, DefectSpec::line_e1()};
  const PerforatedDomain free = PerforatedDomain::whole_space();
  const LatticeBox box{Point2(-1.5, -1.5), Point2(7.5, 1.5)};
  const InitialData g = InitialData::linear(Point2(-1.0, 0.0));
  const double eps = 0.25, T = 0.5;
  const ValueField u = solve_ueps(box_lattice(omega, box, h, model.M0), model, g, eps, T, {0.25});
  const ValueField v = solve_weps(box_lattice(w, box, h, model.M0), model, g, eps, T, {0.25});
  const ValueField ut = solve_tilde_ueps(box_lattice(free, box, h, model.M0), model, g, eps, T, {0.25});
  double worst = -kInf;
  for (int st : {0, u.step_of(0.25), u.step_of(T)})
    for (int z = 0; z < u.lattice().size(); ++z) {
      worst = std::max(worst, excess(ut.value(st, z), v.value(st, z)));
      worst = std::max(worst, excess(v.value(st, z), u.value(st, z)));
    }
  return {name, worst <= 0.0, worst, 0.0, "u~ <= w <= u at every node, LineE1 defects"};
}

std::vector<HamiltonianModel> fixture_models() {
  const HoleShape disc = HoleShape::disc(0.25);
  return {make_model(Family::Free, HoleShape::none(), 1.0, 0.0, 0.0, 1.0),
          make_model(Family::KineticWeight, disc, 1.0, 2.0, 0.05, 1.0),
          make_model(Family::KineticPlusPotential, disc, 1.0, 0.5, 0.0, 1.0),
          make_model(Family::StripeWeight, HoleShape::none(), 1.0, 0.0, 0.0, 1.0)};
}

// Reported value is the worst error as a fraction of the oracle tolerance.
Check legendre(int samples, std::uint64_t seed) {
  const auto models = fixture_models();
  Uniform01 rng(seed);
  double worst = 0.0;
  bool ok = true;
  for (int i = 0; i < samples; ++i) {
    const HamiltonianModel& m = models[i % models.size()];
    const Point2 y(rng(), rng());
    const double r = m.M0 * std::sqrt(rng()), th = 2.0 * std::numbers::pi * rng();
    const Point2 v(r * std::cos(th), r * std::sin(th));
    const double p_radius = legendre_oracle_radius(m, m.M0);
    const int n_grid = 401;
    const double tol = legendre_oracle_tolerance(m, p_radius, n_grid);
    const double diff = eval_L<double>(m, y, v) - legendre_oracle(m, y, v, p_radius, n_grid);
    if (diff < -1e-12 || diff > tol) ok = false;
    worst = std::max(worst, std::abs(diff) / tol);
  }
  return {"legendre_duality", ok, worst, 1.0, fmt("%.0f samples over four families, |v| <= M0", samples)};
}

Check a5(std::uint64_t seed) {
  const auto models = fixture_models();
  Uniform01 rng(seed + 1);
  std::vector<Point2> ys{Point2::Zero(), Point2(0.5, 0.5), Point2(0.1, 0.0)};
  for (int i = 0; i < 64; ++i) ys.emplace_back(rng(), rng());
  bool ok = true;
  double worst = 0.0;
  for (const HamiltonianModel& m : models) {
    const A5Report rep = check_A5(m, ys);
    if (rep.pass != m.declares_a5()) ok = false;
    if (!m.declares_a5()) continue;
    for (const Point2& y : ys) {
      if (eval_L<double>(m, y, Point2::Zero()) != 0.0) ok = false;
      for (int k = 0; k < 16; ++k) {
        const Point2 v(4.0 * rng() - 2.0, 4.0 * rng() - 2.0);
        const double L = eval_L<double>(m, y, v);
        if (L < 0.0) {
          ok = false;
          worst = std::max(worst, -L);
        }
      }
    }
  }
  return {"a5_lagrangian_minimum", ok, worst, 0.0,
          "L(y,0) = 0 = min L for (A5) models; potential model rejected"};
}

// Additivity defects of m* and |m - m*| along y_t = t v, bounded uniformly:
// the values at t in {8, 16} must not exceed the largest at t in {2, 4} by
// more than `growth`.
std::vector<Check> mstar_checks(const HamiltonianModel& model, double h) {
  const PerforatedDomain dom{HoleShape::disc(0.25), 1.0, DefectSpec::none()};
  const Point2 v(0.5, 0.25), x0(0.5, 0.5);
  const double growth = 0.05;
  std::vector<double> sub, sup, diff;
  for (double t : {2.0, 4.0, 8.0, 16.0}) {
    const Point2 y1 = t * v, y2 = 2.0 * t * v;
    const double whole = cost_mstar(around(dom, Point2::Zero(), y2, h, model.M0), model, 2 * t, Point2::Zero(), y2);
    const double a = cost_mstar(around(dom, Point2::Zero(), y1, h, model.M0), model, t, Point2::Zero(), y1);
    const double b = cost_mstar(around(dom, y1, y2, h, model.M0), model, t, y1, y2);
    sub.push_back(whole - a - b);
    sup.push_back(a + b - whole);
    auto lat = around(dom, x0, x0 + y1, h, model.M0);
    diff.push_back(std::abs(cost_m(lat, model, t, x0, x0 + y1) - cost_mstar(lat, model, t, x0, x0 + y1)));
  }
  auto uniform = [&](const char* name, const std::vector<double>& d, const char* what) {
    const double ref = std::max({d[0], d[1], 0.0});
    const double late = std::max(d[2], d[3]);
    return Check{name, late <= ref + growth, late, ref + growth, what};
  };
  return {uniform("mstar_subadditivity", sub, "m*(2t) - m*(t) - m*(t, y_t, y_2t) at t = 8, 16"),
          uniform("mstar_superadditivity", sup, "m*(t) + m*(t, y_t, y_2t) - m*(2t) at t = 8, 16"),
          uniform("m_vs_mstar", diff, "|m - m*| from (0.5, 0.5) at t = 8, 16")};
}

Check homogeneity(const HamiltonianModel& model, double h) {
  const PerforatedDomain dom{HoleShape::disc(0.25), 1.0, DefectSpec::none()};
  const std::vector<int> ks{2, 4, 8};
  bool ok = true;
  double worst = 0.0, worst_tol = 0.0;
  for (const Point2& v : {Point2(1.0, 0.0), Point2(1.0, 1.0), Point2(0.5, 0.5), Point2(1.5, 0.5)}) {
    const MbarResult one = mbar_star(dom, model, 1.0, Point2::Zero(), v, ks, h);
    const MbarResult two = mbar_star(dom, model, 2.0, Point2::Zero(), 2.0 * v, ks, h);
    const double d = std::abs(two.value - 2.0 * one.value);
    const double tol = 2.0 * (one.residual + two.residual) + 1e-9;
    if (d > tol) ok = false;
    if (d >= worst) {
      worst = d;
      worst_tol = tol;
    }
  }
  return {"mbar_homogeneity", ok, worst, worst_tol, "m-bar*(2, 0, 2v) = 2 m-bar*(1, 0, v)"};
}

std::vector<Check> ubar_checks(const HamiltonianModel& model, double h) {
  const PerforatedDomain dom{HoleShape::disc(0.25), 1.0, DefectSpec::none()};
  SamplerSpec spec;
  spec.h = h;
  spec.v_radius = 2.0;
  const LbarSampler sampler(dom, model, spec);
  const LbarGrid grid = tabulate_lbar(sampler);
  double max_res = 0.0;
  for (double r : grid.residual) max_res = std::max(max_res, r);

  EffectiveModel lbar_only;
  lbar_only.lbar = EffectiveModel::from_grid(grid, model).lbar;
  auto cell = std::make_shared<const SpaceTimeLattice>(build_periodic_cell(dom, h, h, model.M0));

  double worst_grid = 0.0, worst_cell = 0.0;
  for (const Point2& p : {Point2(-1.0, 0.0), Point2(0.0, 1.0), Point2(-1.0, 1.0)}) {
    const InitialData g = InitialData::linear(p, 0.25);
    const double hbar = effective_hamiltonian_cell(cell, model, p, {0.1, 0.05}).value;
    EffectiveModel cell_eff;
    cell_eff.hbar = [hbar](const Point2&) { return hbar; };
    for (const Point2& x : {Point2(0.3, -0.2), Point2(0.0, 0.0)}) {
      const double ub = ubar_from_mbar(sampler, g, x, 1.0);
      worst_grid = std::max(worst_grid, std::abs(ub - hopf_lax(lbar_only, g, x, 1.0, 2.0, grid.step)));
      worst_cell = std::max(worst_cell, std::abs(ub - hopf_lax(cell_eff, g, x, 1.0, 0.0, 1.0)));
    }
  }
  const double tol_grid = 2.0 * max_res + 1e-9;
  const double tol_cell = 2.0 * max_res + 0.05;
  return {{"ubar_vs_hopf_lax_lbar", worst_grid <= tol_grid, worst_grid, tol_grid,
           "same L-bar samples through both formulas"},
          {"ubar_vs_hopf_lax_cell", worst_cell <= tol_cell, worst_cell, tol_cell,
           "H-bar from the discounted cell problem"}};
}

}  // namespace

std::vector<Check> validate_suite(const ValidateConfig& cfg) {
  const double h = cfg.h;
  const HamiltonianModel free = free_model(1.0, {std::nullopt, std::nullopt, 3.0});
  const HamiltonianModel kinetic = make_model(Family::KineticWeight, HoleShape::disc(0.25), 1.0, 2.0,
                                              0.05, 1.0, {std::nullopt, std::nullopt, 3.0});
  const PerforatedDomain dom{HoleShape::disc(0.25), 1.0, DefectSpec::none()};

  std::vector<Check> out;
  out.push_back(dpp_identity(free, dom, h));
  out.push_back(hole_monotonicity(free, h));
  out.push_back(sandwich(free, "sandwich_free", h));
  out.push_back(sandwich(kinetic, "sandwich_kinetic_weight", h));
  out.push_back(legendre(cfg.legendre_samples, cfg.seed));
  out.push_back(a5(cfg.seed));
  for (Check& c : mstar_checks(free, h)) out.push_back(std::move(c));
  out.push_back(homogeneity(free, h));
  for (Check& c : ubar_checks(free, h)) out.push_back(std::move(c));
  return out;
}

}  // namespace hjperf
