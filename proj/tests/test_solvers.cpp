#include "hjperf/solvers.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

using namespace hjperf;

namespace {

ModelOverrides m0(double v) { return {std::nullopt, std::nullopt, v}; }

const PerforatedDomain kDisc{HoleShape::disc(0.25), 1.0, DefectSpec::none()};

HamiltonianModel free3() { return free_model(1.0, m0(3.0)); }
HamiltonianModel stripe3() {
  return make_model(Family::StripeWeight, HoleShape::none(), 1.0, 0, 0, 1.0, m0(3.0));
}
HamiltonianModel kinetic3() {
  return make_model(Family::KineticWeight, kDisc.hole, 1.0, 2.0, 0.05, 1.0, m0(3.0));
}

LatticePtr box(const PerforatedDomain& dom, const LatticeBox& b, double h = 0.05) {
  return std::make_shared<const SpaceTimeLattice>(build_lattice(dom, h, b, h, 3.0));
}
LatticePtr torus(const PerforatedDomain& dom, double h = 0.05) {
  return std::make_shared<const SpaceTimeLattice>(build_periodic_cell(dom, h, h, 3.0));
}

const InitialData kG = InitialData::linear(Point2(-1, 0));

// max and min over every node of u1 - u2 at the final step, on nodes where both are finite
std::pair<double, double> diff_range(const ValueField& a, const ValueField& b) {
  double hi = -kInf, lo = kInf;
  const int s = a.field.steps;
  for (int i = 0; i < a.lattice().size(); ++i) {
    const double x = a.value(s, i), y = b.value(s, i);
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    hi = std::max(hi, x - y);
    lo = std::min(lo, x - y);
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("initial data") {
  CHECK(kG.lip() == 1.0);
  CHECK(InitialData::constant(2.0).lip() == 0.0);
  CHECK(kG(Point2(0.3, 7.0)) == -0.3);
}

TEST_CASE("solve_ueps examples") {
  const auto lat = box(kDisc, LatticeBox::cells(-2, -2, 2, 2));
  const ValueField z = solve_ueps(lat, kinetic3(), InitialData::zero(), 0.25, 1.0);
  for (int s : {0, z.field.steps})
    for (int i = 0; i < lat->size(); ++i)
      if (lat->admissible(i)) REQUIRE(z.value(s, i) == 0.0);

  const ValueField u = solve_ueps(lat, free3(), kG, 0.25, 1.0, {0.5});
  for (int i = 0; i < lat->size(); ++i)
    if (lat->admissible(i)) REQUIRE(u.value(0, i) == kG(u.position(i)));

  // comparison band g - t max H(y, Dg) <= u <= g + t max V
  const double Hmax = 0.5;
  for (double t : {0.5, 1.0}) {
    const int s = u.step_of(t);
    for (int i = 0; i < lat->size(); ++i) {
      if (!lat->admissible(i)) continue;
      const double g = kG(u.position(i));
      REQUIRE(u.value(s, i) >= g - t * Hmax - 1e-12);
      REQUIRE(u.value(s, i) <= g + 1e-12);
    }
  }
}

TEST_CASE("solver properties") {
  const auto lat = box(kDisc, LatticeBox::cells(-2, -2, 2, 2));
  const ValueField u = solve_ueps(lat, free3(), kG, 0.25, 0.5);

  SUBCASE("constant shift") {
    const ValueField v = solve_ueps(lat, free3(), InitialData::linear(Point2(-1, 0), 0.75), 0.25, 0.5);
    const auto [lo, hi] = diff_range(v, u);
    CHECK(lo == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(hi == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("comparison") {
    // g2 - g1 = 0.05 (1 + x2) >= 0 on the box
    const ValueField v = solve_ueps(lat, free3(), InitialData::linear(Point2(-1, 0.05), 0.05), 0.25, 0.5);
    CHECK(diff_range(v, u).first >= 0.0);
  }
  SUBCASE("discrete Lipschitz in time") {
    const ValueField f = solve_ueps(lat, free3(), kG, 0.25, 0.5, {0.0125, 0.025, 0.2});
    const double dt = f.dt();
    const double bound = (free3().K0 + 0.5 * 9.0) * dt;
    for (int i = 0; i < lat->size(); ++i) {
      if (!lat->admissible(i)) continue;
      REQUIRE(std::abs(f.value(1, i) - f.value(0, i)) <= bound + 1e-12);
      REQUIRE(std::abs(f.value(2, i) - f.value(1, i)) <= bound + 1e-12);
    }
  }
}

TEST_CASE("whole-space stripe value") {
  for (double eps : {0.25, 0.125}) {
    const ValueField u = solve_tilde_ueps(torus(PerforatedDomain::whole_space(), 0.02), stripe3(), kG, eps, 1.0);
    CHECK(std::abs(u.at(Point2::Zero(), 1.0) + 0.5) <= 0.03);
  }
  const ValueField z = solve_tilde_ueps(torus(PerforatedDomain::whole_space()), stripe3(), InitialData::zero(), 0.25, 1.0);
  for (double v : z.field.final_slice()) CHECK(v == 0.0);
  CHECK_THROWS_AS(solve_tilde_ueps(torus(kDisc), stripe3(), kG, 0.25, 1.0), ConfigError);
}

TEST_CASE("domain monotonicity and the sandwich") {
  const LatticeBox b = LatticeBox::cells(-2, -2, 3, 2);
  const PerforatedDomain W{kDisc.hole, 1.0, DefectSpec::line_e1()};
  const auto lu = box(kDisc, b), lw = box(W, b), lt = box(PerforatedDomain::whole_space(), b);
  const auto model = make_model(Family::KineticWeight, kDisc.hole, 1.0, 2.0, 0.05, 1.0, m0(3.0));
  const ValueField u = solve_ueps(lu, model, kG, 0.25, 0.5);
  const ValueField w = solve_weps(lw, model, kG, 0.25, 0.5);
  const ValueField t = solve_tilde_ueps(lt, model, kG, 0.25, 0.5);
  CHECK(diff_range(u, w).first >= 0.0);
  CHECK(diff_range(w, t).first >= 0.0);
  CHECK(diff_range(u, t).first >= 0.0);

  const auto lw0 = box(PerforatedDomain{kDisc.hole, 1.0, DefectSpec::none()}, b);
  const ValueField w0 = solve_weps(lw0, model, kG, 0.25, 0.5);
  CHECK(w0.field.final_slice() == u.field.final_slice());
  CHECK_THROWS_AS(solve_ueps(lw, model, kG, 0.25, 0.5), ConfigError);
}

TEST_CASE("resting in a defect hole collects the potential") {
  const double beta = 0.5;
  const PerforatedDomain W{kDisc.hole, 1.0, DefectSpec::singleton0()};
  const auto model = make_model(Family::KineticPlusPotential, kDisc.hole, 1.0, beta, 0.0, 0.0, m0(3.0));
  const auto lat = box(W, LatticeBox::cells(-1, -1, 1, 1));
  const ValueField w = solve_weps(lat, model, InitialData::zero(), 0.125, 1.0);
  CHECK(w.at(Point2::Zero(), 1.0) <= -beta + 0.02);
}

TEST_CASE("torus reduction matches the box solve for linear g") {
  const auto lt = torus(kDisc);
  const auto lb = box(kDisc, LatticeBox::cells(-3, -3, 3, 3));
  const ValueField a = solve_ueps(lt, free3(), kG, 0.25, 0.25);
  const ValueField b = solve_ueps(lb, free3(), kG, 0.25, 0.25);
  for (const Point2& x : {Point2(0.125, 0.125), Point2(0.0, 0.1), Point2(-0.1, 0.05)}) {
    const double va = a.at(x, 0.25), vb = b.at(x, 0.25);
    if (std::isfinite(vb)) CHECK(va == doctest::Approx(vb).epsilon(1e-9));
  }
}

TEST_CASE("snapping") {
  const ValueField u = solve_ueps(torus(kDisc), free3(), kG, 0.25, 0.25);
  const Point2 s = u.snap_admissible(Point2::Zero(), 0.5);
  CHECK(std::isfinite(u.at(s, 0.25)));
  CHECK((s / 0.25).norm() >= 0.25 - 1e-9);
  CHECK_THROWS_AS(u.snap_admissible(Point2::Zero(), 0.1), Unreachable);
  CHECK(u.at(Point2::Zero(), 0.25) == kInf);
}

TEST_CASE("hopf_lax examples") {
  const EffectiveModel q = EffectiveModel::quadratic();
  CHECK(hopf_lax(q, kG, Point2::Zero(), 1.0, 3.0, 0.05) == doctest::Approx(-0.5));
  CHECK(hopf_lax(q, kG, Point2(0.3, 0.2), 0.5, 3.0, 0.05) == doctest::Approx(-0.3 - 0.25));
  CHECK(hopf_lax(q, kG, Point2(0.3, 0.2), 0.0, 3.0, 0.05) == doctest::Approx(-0.3));

  EffectiveModel lonly;
  lonly.lbar = q.lbar;
  CHECK(hopf_lax(lonly, kG, Point2(0.3, 0.2), 1.0, 3.0, 0.05) == doctest::Approx(-0.8).epsilon(1e-12));

  EffectiveModel aniso;
  aniso.hbar = [](const Point2& p) { return p.x() * p.x() + 0.25 * p.y() * p.y(); };
  const InitialData g = InitialData::linear(Point2(0.5, -2.0), 1.0);
  CHECK(hopf_lax(aniso, g, Point2(1, 1), 2.0, 3.0, 0.05) == doctest::Approx(g(Point2(1, 1)) - 2.0 * (0.25 + 1.0)));

  // (A5)-type: L-bar >= 0 with L-bar(0) = 0
  EffectiveModel rest;
  rest.lbar = [](const Point2& v) { return v.squaredNorm(); };
  CHECK(hopf_lax(rest, InitialData::constant(1.5), Point2(0.2, 0.2), 1.0, 2.0, 0.1) == 1.5);
}

TEST_CASE("u-bar from m-bar") {
  SamplerSpec spec;
  spec.h = 0.05;
  spec.v_radius = 2.0;
  const LbarSampler s(kDisc, free3(), spec);
  CHECK(std::abs(ubar_from_mbar(s, kG, Point2::Zero(), 1.0) + 0.5) <= 0.05);
  const LbarSampler a5(kDisc, kinetic3(), spec);
  CHECK(std::abs(ubar_from_mbar(a5, InitialData::zero(), Point2::Zero(), 1.0)) <= 1e-9);
  CHECK_THROWS_AS(ubar_from_mbar(s, kG, Point2::Zero(), 0.5), ConfigError);
}

TEST_CASE("value field CSV") {
  const auto lat = box(kDisc, LatticeBox::cells(0, 0, 0, 0));
  const ValueField u = solve_ueps(lat, free3(), kG, 0.25, 0.125);
  std::ostringstream os;
  write_value_field_csv(u, os);
  CHECK(os.str().rfind("t,x,y,value\n", 0) == 0);
}
