#include "hjperf/effective.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

using namespace hjperf;

namespace {

ModelOverrides m0(double v) { return {std::nullopt, std::nullopt, v}; }

const PerforatedDomain kDisc{HoleShape::disc(0.25), 1.0, DefectSpec::none()};
const std::vector<int> kK{2, 4, 8};

// Holes block straight paths, so the upper side of the L-bar envelope needs a
// larger constant than the clamp K0 of H (0 for the free model). Frozen from
// the h = 0.05 grid of radius 2.
constexpr double kEffectiveK0 = 0.25 + 1e-9;

HamiltonianModel free3() { return free_model(1.0, m0(3.0)); }
HamiltonianModel kinetic3() {
  return make_model(Family::KineticWeight, kDisc.hole, 1.0, 2.0, 0.05, 1.0, m0(3.0));
}

LatticePtr cell(const PerforatedDomain& dom, double h, const HamiltonianModel& m) {
  return std::make_shared<const SpaceTimeLattice>(build_periodic_cell(dom, h, h, m.M0));
}

const LbarGrid& disc_grid() {
  static const LbarGrid g = [] {
    SamplerSpec spec;
    spec.h = 0.05;
    spec.v_radius = 2.0;
    return tabulate_lbar(LbarSampler(kDisc, free3(), spec));
  }();
  return g;
}

}  // namespace

TEST_CASE("mbar_star examples") {
  const MbarResult rest = mbar_star(kDisc, kinetic3(), 1.0, Point2::Zero(), Point2::Zero(), kK, 0.05);
  CHECK(std::abs(rest.value) <= 1e-9);

  const MbarResult e1 = mbar_star(kDisc, free3(), 1.0, Point2::Zero(), Point2(1, 0), kK, 0.05);
  CHECK(std::abs(e1.value - 0.5) <= 0.05);

  for (const Point2& y : {Point2(1, 0), Point2(1, 1), Point2(0.5, 0.5)}) {
    const MbarResult a = mbar_star(kDisc, free3(), 1.0, Point2::Zero(), y, kK, 0.05);
    const MbarResult b = mbar_star(kDisc, free3(), 2.0, Point2::Zero(), Point2(2.0 * y), kK, 0.05);
    CHECK(std::abs(b.value - 2.0 * a.value) <= 2.0 * (a.residual + b.residual) + 1e-9);
  }
  CHECK_THROWS_AS(mbar_star(kDisc, free3(), 1.0, Point2::Zero(), Point2(1, 0), {2, 4}, 0.05), ConfigError);
}

TEST_CASE("effective_lagrangian examples") {
  CHECK(std::abs(effective_lagrangian(kDisc, kinetic3(), Point2::Zero(), kK, 0.05)) <= 1e-9);
  const double l = effective_lagrangian(kDisc, free3(), Point2(1, 0), kK, 0.05);
  CHECK(l >= 0.5 - 0.05);
  CHECK(l <= 0.5 + free3().K0 + 0.05);
  CHECK(effective_lagrangian(PerforatedDomain::whole_space(), free3(), Point2(1, 0), kK, 0.05) ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(effective_lagrangian(kDisc, free3(), Point2(4, 0), kK, 0.05), ConfigError);
}

TEST_CASE("L-bar grid invariants") {
  const LbarGrid& g = disc_grid();
  CHECK(g.step == doctest::Approx(default_v_step(kK)));
  CHECK(default_v_step({8, 16, 32}) == doctest::Approx(0.125));
  REQUIRE_FALSE(g.v.empty());
  const double K0 = free3().K0;
  double excess = 0.0;
  for (std::size_t i = 0; i < g.v.size(); ++i) {
    CHECK(std::isfinite(g.value[i]));
    CHECK(g.value[i] >= g.v[i].squaredNorm() / 2.0 - K0 - 0.05);
    excess = std::max(excess, g.value[i] - g.v[i].squaredNorm() / 2.0);
  }
  MESSAGE("max L-bar excess over |v|^2/2: " << excess);
  CHECK(excess <= kEffectiveK0);
}

TEST_CASE("metric H-bar examples") {
  const LbarGrid& g = disc_grid();
  for (const Point2& p : {Point2(-1, 0), Point2(1, 0), Point2(0, 1), Point2(0, -1)}) {
    const HbarEstimate e = effective_hamiltonian_metric(g, free3(), p);
    CHECK(e.covered);
    CHECK(std::abs(e.value - 0.5) <= 0.05);
    // stored samples are dominated
    for (std::size_t i = 0; i < g.v.size(); ++i) CHECK(e.value >= p.dot(g.v[i]) - g.value[i] - 1e-12);
  }
  const HbarEstimate d = effective_hamiltonian_metric(g, free3(), Point2(1, 1));
  CHECK(d.value <= 1.0 + 0.05);
  for (const Point2& p : {Point2(1, 0.5), Point2(0.5, -1), Point2(-1, 1), Point2(0.5, 0.5)}) {
    const double v = effective_hamiltonian_metric(g, free3(), p).value;
    CHECK(v <= p.squaredNorm() / 2.0 + free3().K0 + 0.05);
    CHECK(v >= p.squaredNorm() / 2.0 - kEffectiveK0 - 0.05);
  }

  SamplerSpec spec;
  spec.h = 0.05;
  spec.v_radius = 1.0;
  const LbarGrid a5 = tabulate_lbar(LbarSampler(kDisc, kinetic3(), spec));
  CHECK(std::abs(effective_hamiltonian_metric(a5, kinetic3(), Point2::Zero()).value) <= 1e-9);
}

TEST_CASE("axis values for s in {1, 2}") {
  SamplerSpec spec;
  spec.h = 0.05;
  spec.v_radius = 3.0;
  const LbarGrid g = tabulate_lbar(LbarSampler(kDisc, free3(), spec));
  for (double s : {1.0, 2.0})
    for (const Point2& e : {Point2(1, 0), Point2(0, 1)}) {
      const HbarEstimate h = effective_hamiltonian_metric(g, free3(), Point2(s * e));
      CHECK(std::abs(h.value - s * s / 2.0) <= 0.05);
    }
}

TEST_CASE("cell H-bar examples") {
  const std::vector<double> lambdas{0.1, 0.05};
  const auto flat = cell(PerforatedDomain::whole_space(), 0.05, free3());
  CHECK(std::abs(effective_hamiltonian_cell(flat, free3(), Point2(1, 0), lambdas).value - 0.5) <= 1e-6);

  const auto holes = cell(kDisc, 0.05, free3());
  const CellResult c = effective_hamiltonian_cell(holes, free3(), Point2(-1, 0), lambdas);
  CHECK(std::abs(c.value - 0.5) <= 0.05);
  const double metric = effective_hamiltonian_metric(disc_grid(), free3(), Point2(-1, 0)).value;
  CHECK(std::abs(c.value - metric) <= 0.05);
  CHECK(c.corrector[c.z0] == 0.0);
  CHECK(holes->point(c.z0).isApprox(Point2(0.5, 0.5)));

  // monotonicity against the hole-free cell
  for (const Point2& p : {Point2(1, 1), Point2(1, 0.5), Point2(0, 1)}) {
    const double ho = effective_hamiltonian_cell(holes, free3(), p, lambdas).value;
    const double h0 = effective_hamiltonian_cell(flat, free3(), p, lambdas).value;
    CHECK(ho <= h0 + 0.02);
  }
  CHECK_THROWS_AS(effective_hamiltonian_cell(holes, free3(), Point2(1, 0), {0.05, 0.1}), ConfigError);
}

TEST_CASE("dilute cell drifts toward the hole-free value") {
  const HamiltonianModel sm = make_model(Family::StripeWeight, HoleShape::none(), 1.0, 0, 0, 1.0, m0(3.0));
  const std::vector<double> lambdas{0.1, 0.05};
  const double h = 0.025;
  const Point2 p(1, 1);
  const double h0 = effective_hamiltonian_cell(cell(PerforatedDomain::whole_space(), h, sm), sm, p, lambdas).value;
  double prev = kInf;
  for (double eta : {0.8, 0.4, 0.2}) {
    const PerforatedDomain dom{HoleShape::disc(0.25), eta, DefectSpec::none()};
    const double he = effective_hamiltonian_cell(cell(dom, h, sm), sm, p, lambdas).value;
    const double drift = std::abs(he - h0);
    MESSAGE("eta " << eta << " drift " << drift);
    CHECK(drift <= 1.0 * (eta + h));
    CHECK(drift <= prev + 1e-9);
    prev = drift;
  }
}

TEST_CASE("inf-sup certificate") {
  const auto holes = cell(kDisc, 0.05, free3());
  const std::vector<double> zero(holes->size(), 0.0);
  for (const Point2& p : {Point2(1, 0), Point2(1, 1), Point2(-2, 0.5)})
    CHECK(infsup_upper_bound(*holes, free3(), p, zero) == doctest::Approx(p.squaredNorm() / 2.0));

  const CellResult c = effective_hamiltonian_cell(holes, free3(), Point2(-1, 0), {0.1, 0.05});
  const double corr = infsup_upper_bound(*holes, free3(), Point2(-1, 0), c.corrector);
  const double cert = std::min(corr, infsup_upper_bound(*holes, free3(), Point2(-1, 0), zero));
  MESSAGE("certificate with the discounted corrector: " << corr);
  CHECK(corr >= 0.5 - 0.05);
  CHECK(cert >= 0.5 - 0.05);
  CHECK(cert <= 0.5 + 0.05);

  const auto flat = cell(PerforatedDomain::whole_space(), 0.05, kinetic3());
  CHECK(infsup_upper_bound(*flat, kinetic3(), Point2::Zero(), std::vector<double>(flat->size(), 0.0)) == 0.0);
}

TEST_CASE("effective CSV") {
  EffectiveTable t;
  t.add("Hbar_metric", Point2(-1, 0), 0.5, 0.0);
  std::ostringstream os;
  write_effective_csv(t, os);
  CHECK(os.str().rfind("kind,component1,component2,value,residual\n", 0) == 0);
  CHECK(os.str().find("Hbar_metric,-1,0,0.5,0") != std::string::npos);
}
