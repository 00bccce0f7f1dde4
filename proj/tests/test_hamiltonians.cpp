#include "hjperf/hamiltonians.hpp"
#include "hjperf/random.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace hjperf;

namespace {

HamiltonianModel stripe() {
  return make_model(Family::StripeWeight, HoleShape::none(), 1.0, 0.0, 0.0, 1.0);
}

HamiltonianModel kinetic() {
  return make_model(Family::KineticWeight, HoleShape::disc(0.25), 1.0, 2.0, 0.05, 1.0);
}

HamiltonianModel potential_model(double beta) {
  return make_model(Family::KineticPlusPotential, HoleShape::disc(0.25), 1.0, beta, 0.0, 1.0);
}

double family_formula(const HamiltonianModel& m, const Point2& y, const Point2& p) {
  return weight(m, y) * p.squaredNorm() / 2.0 + potential(m, y);
}

}  // namespace

TEST_CASE("eval_H point values") {
  const auto fm = free_model();
  CHECK(eval_H<double>(fm, Point2(0.3, 0.3), Point2(1, 0)) == doctest::Approx(0.5));
  CHECK(eval_H<double>(stripe(), Point2(0, 0.25), Point2(1, 0)) == doctest::Approx(0.375));

  const Point2 far(10.0 * fm.C0, 0.0);
  const double H = eval_H<double>(fm, Point2(0.1, 0.7), far);
  CHECK(std::abs(H - far.squaredNorm() / 2.0) <= fm.K0 + 1e-12);
}

TEST_CASE("eval_L point values") {
  CHECK(eval_L<double>(free_model(), Point2(0.4, 0.1), Point2(1, 0)) == doctest::Approx(0.5));
  CHECK(eval_L<double>(stripe(), Point2(0, 0.25), Point2(1, 0)) == doctest::Approx(2.0 / 3.0));
  // a = 1 outside the hole
  CHECK(eval_L<double>(kinetic(), Point2(0.5, 0.5), Point2::Zero()) == 0.0);
}

TEST_CASE("legendre oracle examples") {
  const auto fm = free_model();
  const double tol = legendre_oracle_tolerance(fm, 4.0, 257);
  CHECK(std::abs(legendre_oracle(fm, Point2::Zero(), Point2(1, 0), 4.0, 257) - 0.5) <= tol);

  const auto pm = potential_model(0.3);
  CHECK(potential(pm, Point2(0, 0)) == doctest::Approx(0.3));
  CHECK(std::abs(legendre_oracle(pm, Point2::Zero(), Point2::Zero(), 4.0, 257) + 0.3) <= tol);

  const auto sm = stripe();
  const double stol = legendre_oracle_tolerance(sm, 4.0, 257);
  CHECK(std::abs(legendre_oracle(sm, Point2(0, 0.25), Point2(1, 0), 4.0, 257) - 2.0 / 3.0) <= stol);
}

TEST_CASE("check_A5 examples") {
  std::vector<Point2> samples;
  for (int j = 0; j < 9; ++j)
    for (int i = 0; i < 9; ++i) samples.emplace_back(-0.5 + i / 8.0, -0.5 + j / 8.0);
  CHECK(check_A5(kinetic(), samples).pass);
  CHECK(check_A5(free_model(), samples).pass);
  CHECK(check_A5(stripe(), samples).pass);

  const std::vector<Point2> inside{Point2(0, 0)};
  const A5Report rep = check_A5(potential_model(0.5), inside);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_abs_H0 == doctest::Approx(0.5));
  CHECK_FALSE(potential_model(0.5).declares_a5());
  CHECK(potential_model(0.0).declares_a5());
}

TEST_CASE("velocity_bound") {
  auto m = free_model(1.0);
  REQUIRE(m.K0 == 0.0);
  const double M0 = velocity_bound(m, 1.0);
  const double C = 1.0 + 2.0 * m.K0 + 1.0;
  CHECK(M0 * M0 / 2.0 == doctest::Approx(C * M0 + C + m.K0));
  CHECK(velocity_bound(m, 0.0) > 0.0);
  CHECK(velocity_bound(m, 2.0) > velocity_bound(m, 1.0));
  CHECK_THROWS_AS(velocity_bound(m, -1.0), ConfigError);
  CHECK_THROWS_AS(make_model(Family::Free, HoleShape::none(), 1.0, 0, 0, -1.0), ConfigError);
}

TEST_CASE("make_model rejects bad input") {
  CHECK_THROWS_AS(make_model(Family::KineticWeight, HoleShape::disc(0.25), 1.0, 0.5, 0.05, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(make_model(Family::KineticPlusPotential, HoleShape::none(), 1.0, 0.5, 0.0, 1.0),
                  ConfigError);
  ModelOverrides small_k0;
  small_k0.K0 = 0.0;
  CHECK_THROWS_AS(make_model(Family::StripeWeight, HoleShape::none(), 1.0, 0, 0, 1.0, small_k0),
                  ConfigError);
}

TEST_CASE("envelope and exact family formula on 10^4 samples") {
  const std::vector<HamiltonianModel> models{free_model(), stripe(), kinetic(), potential_model(0.4)};
  for (const auto& m : models) {
    Uniform01 u(11);
    const double R = m.clamp_radius();
    for (int i = 0; i < 10000; ++i) {
      const Point2 y(2.0 * u() - 1.0, 2.0 * u() - 1.0);
      const Point2 p((2.0 * u() - 1.0) * 3.0 * R, (2.0 * u() - 1.0) * 3.0 * R);
      const double H = eval_H<double>(m, y, p);
      const double q = p.squaredNorm() / 2.0;
      if (p.norm() <= R) REQUIRE(H == doctest::Approx(family_formula(m, y, p)).epsilon(1e-14));
      REQUIRE(H >= q - m.K0 - 1e-9);
      REQUIRE(H <= q + m.K0 + 1e-9);
    }
  }
}

TEST_CASE("duality against the oracle") {
  const std::vector<HamiltonianModel> models{free_model(), stripe(), kinetic(), potential_model(0.4)};
  for (const auto& m : models) {
    Uniform01 u(5);
    const double pr = legendre_oracle_radius(m, m.M0);
    const int n = 201;
    const double tol = legendre_oracle_tolerance(m, pr, n);
    for (int i = 0; i < 250; ++i) {
      const Point2 y(u() - 0.5, u() - 0.5);
      const double r = m.M0 * std::sqrt(u());
      const double th = 2.0 * 3.141592653589793 * u();
      const Point2 v(r * std::cos(th), r * std::sin(th));
      const double L = eval_L<double>(m, y, v);
      const double o = legendre_oracle(m, y, v, pr, n);
      REQUIRE(o <= L + 1e-9);
      REQUIRE(L - o <= tol);
      // away from the clamp kink the error is second order
      const double step = 2.0 * pr / (n - 1);
      if (v.norm() < weight(m, y) * (m.clamp_radius() - step))
        REQUIRE(L - o <= std::max(m.weight_max(), 1.0) * step * step / 4.0 + 1e-12);
    }
  }
}

TEST_CASE("A5 models have L(y,0) = 0 = min L") {
  for (const auto& m : {free_model(), stripe(), kinetic()}) {
    Uniform01 u(3);
    for (int i = 0; i < 500; ++i) {
      const Point2 y(u() - 0.5, u() - 0.5);
      const Point2 v(4.0 * u() - 2.0, 4.0 * u() - 2.0);
      REQUIRE(eval_L<double>(m, y, Point2::Zero()) == 0.0);
      REQUIRE(eval_L<double>(m, y, v) >= 0.0);
    }
  }
}

TEST_CASE("convexity along lines") {
  for (const auto& m : {free_model(), stripe(), kinetic(), potential_model(0.4)}) {
    Uniform01 u(17);
    const double R = m.clamp_radius();
    for (int i = 0; i < 200; ++i) {
      const Point2 y(u() - 0.5, u() - 0.5);
      const Point2 p0((2 * u() - 1) * R, (2 * u() - 1) * R);
      Point2 d(u() - 0.5, u() - 0.5);
      d.normalize();
      const double ds = 0.05;
      for (int k = -60; k <= 60; ++k) {
        const double s = k * ds;
        const double f0 = eval_H<double>(m, y, Point2(p0 + (s - ds) * d));
        const double f1 = eval_H<double>(m, y, Point2(p0 + s * d));
        const double f2 = eval_H<double>(m, y, Point2(p0 + (s + ds) * d));
        REQUIRE(f0 - 2.0 * f1 + f2 >= -1e-9);
      }
    }
  }
}
