#pragma once

#include "hjperf/geometry.hpp"
#include "hjperf/types.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <string>

namespace hjperf {

enum class Family { Free, KineticWeight, KineticPlusPotential, StripeWeight };

std::string to_string(Family family);

/// Convex Hamiltonian of radial form H(y,p) = A(y)|p|^2/2 + B(y) for
/// |p| <= clamp_radius(), blended convexly into the envelope
/// |p|^2/2 - K0 <= H <= |p|^2/2 + K0 beyond it.
///
/// A is the weight (1 for Free and KineticPlusPotential, a(y) otherwise) and
/// B the potential (V(y) for KineticPlusPotential, 0 otherwise). Hole-supported
/// coefficients live on `support` scaled by `support_eta`, periodized over Z^2.
struct HamiltonianModel {
  Family family = Family::Free;

  HoleShape support;
  double support_eta = 1.0;

  double alpha = 1.0;  // weight amplitude inside holes, >= 1
  double rho = 0.05;   // weight mollification width
  double beta = 0.0;   // potential amplitude, >= 0
  double rho_v = 0.0;  // potential ramp width; <= 0 means the hole inradius

  double lip_g = 0.0;
  double C0 = 1.0;
  double K0 = 0.0;
  double M0 = 1.0;

  double clamp_radius() const { return 2.0 * C0 + 1.0; }
  double weight_min() const;
  double weight_max() const;
  double potential_max() const { return family == Family::KineticPlusPotential ? beta : 0.0; }
  bool declares_a5() const { return potential_max() == 0.0; }
};

struct ModelOverrides {
  std::optional<double> C0;
  std::optional<double> K0;
  std::optional<double> M0;
};

/// Builds a model and derives C0, K0 and M0 from the coefficients and
/// Lip(g) unless overridden. Throws ConfigError on inconsistent input.
HamiltonianModel make_model(Family family, const HoleShape& support, double support_eta,
                            double amplitude, double width, double lip_g,
                            const ModelOverrides& overrides = {});

inline HamiltonianModel free_model(double lip_g = 1.0, const ModelOverrides& o = {}) {
  return make_model(Family::Free, HoleShape::none(), 1.0, 0.0, 0.0, lip_g, o);
}

template <typename Scalar>
Scalar smoothstep(Scalar t) {
  if (t <= Scalar(0)) return Scalar(0);
  if (t >= Scalar(1)) return Scalar(1);
  return t * t * (Scalar(3) - Scalar(2) * t);
}

/// Weight A(y).
template <typename Scalar>
Scalar weight(const HamiltonianModel& m, const Vec2<Scalar>& y) {
  using std::abs;
  using std::floor;
  switch (m.family) {
    case Family::Free:
    case Family::KineticPlusPotential:
      return Scalar(1);
    case Family::StripeWeight: {
      const Scalar y2 = y.y() - floor(y.y() + Scalar(0.5));
      return Scalar(1) - abs(y2);
    }
    case Family::KineticWeight: {
      if (m.support.empty() || m.alpha == 1.0) return Scalar(1);
      const Vec2<Scalar> q = y - cell_of(y).template cast<Scalar>();
      const Scalar depth = hole_depth(m.support, m.support_eta, q);
      return Scalar(1) + Scalar(m.alpha - 1.0) * smoothstep(depth / Scalar(m.rho));
    }
  }
  return Scalar(1);
}

/// Potential B(y).
template <typename Scalar>
Scalar potential(const HamiltonianModel& m, const Vec2<Scalar>& y) {
  if (m.family != Family::KineticPlusPotential || m.beta == 0.0 || m.support.empty())
    return Scalar(0);
  const Vec2<Scalar> q = y - cell_of(y).template cast<Scalar>();
  const Scalar depth = hole_depth(m.support, m.support_eta, q);
  const double width = m.rho_v > 0.0 ? m.rho_v : m.support_eta * m.support.inradius();
  return Scalar(m.beta) * smoothstep(depth / Scalar(width));
}

/// Radial profile F(r) of the clamped Hamiltonian for weight a, potential b.
template <typename Scalar>
Scalar clamped_profile(Scalar a, Scalar b, double clamp_radius, Scalar r) {
  const Scalar R = Scalar(clamp_radius);
  if (r <= R) return a * r * r / Scalar(2) + b;
  if (a <= Scalar(1)) return r * r / Scalar(2) - (Scalar(1) - a) * R * R / Scalar(2) + b;
  const Scalar c = a - Scalar(1);
  if (r <= a * R) {
    const Scalar s = r - R;
    return r * r / Scalar(2) + c * R * R / Scalar(2) + c * R * s - s * s / Scalar(2) + b;
  }
  return r * r / Scalar(2) + c * a * R * R / Scalar(2) + b;
}

/// Legendre dual of clamped_profile, as a function of the speed s = |v|.
template <typename Scalar>
Scalar clamped_dual(Scalar a, Scalar b, double clamp_radius, Scalar s) {
  const Scalar R = Scalar(clamp_radius);
  if (s <= a * R) return s * s / (Scalar(2) * a) - b;
  if (a <= Scalar(1)) {
    if (s <= R) return s * R - a * R * R / Scalar(2) - b;
    return s * s / Scalar(2) + (Scalar(1) - a) * R * R / Scalar(2) - b;
  }
  return s * s / Scalar(2) - (a - Scalar(1)) * a * R * R / Scalar(2) - b;
}

template <typename Scalar>
Scalar eval_H(const HamiltonianModel& m, const Vec2<Scalar>& y, const Vec2<Scalar>& p) {
  return clamped_profile(weight(m, y), potential(m, y), m.clamp_radius(), Scalar(p.norm()));
}

template <typename Scalar>
Scalar eval_L(const HamiltonianModel& m, const Vec2<Scalar>& y, const Vec2<Scalar>& v) {
  return clamped_dual(weight(m, y), potential(m, y), m.clamp_radius(), Scalar(v.norm()));
}

/// Brute-force Legendre transform: max over an n_grid x n_grid p-grid on
/// [-p_radius, p_radius]^2 of p.v - H(y,p). Used to check eval_L.
double legendre_oracle(const HamiltonianModel& m, const Point2& y, const Point2& v, double p_radius,
                       int n_grid);

/// p-box radius containing the maximizer for every |v| <= v_max: the
/// maximizer has |p| <= |v| / min(a, 1).
double legendre_oracle_radius(const HamiltonianModel& m, double v_max);

/// Worst-case underestimate of legendre_oracle caused by the grid spacing,
/// provided the maximizer lies inside the p-box. Second order in the spacing,
/// plus a first-order term when a weight below 1 leaves a kink at the clamp.
double legendre_oracle_tolerance(const HamiltonianModel& m, double p_radius, int n_grid);

struct A5Report {
  double max_abs_H0 = 0.0;     // max over samples of |H(y,0)|
  double max_below_zero = 0.0;  // max over samples of max(0, -min_p H(y,p))
  bool pass = false;
};

A5Report check_A5(const HamiltonianModel& m, std::span<const Point2> samples, double tol = 1e-12);

/// M0 = C + sqrt(C^2 + 2(C + K0)) with C = lip_g + 2 K0 + 1.
double velocity_bound(const HamiltonianModel& m, double lip_g);

}  // namespace hjperf
