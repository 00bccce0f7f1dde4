#include "hjperf/hamiltonians.hpp"

#include <algorithm>

namespace hjperf {

std::string to_string(Family family) {
  switch (family) {
    case Family::Free: return "Free";
    case Family::KineticWeight: return "KineticWeight";
    case Family::KineticPlusPotential: return "KineticPlusPotential";
    case Family::StripeWeight: return "StripeWeight";
  }
  return "?";
}

double HamiltonianModel::weight_min() const {
  switch (family) {
    case Family::StripeWeight: return 0.5;
    case Family::KineticWeight: return 1.0;
    default: return 1.0;
  }
}

double HamiltonianModel::weight_max() const {
  return family == Family::KineticWeight && !support.empty() ? alpha : 1.0;
}

HamiltonianModel make_model(Family family, const HoleShape& support, double support_eta,
                            double amplitude, double width, double lip_g,
                            const ModelOverrides& overrides) {
  const char* where = "hamiltonians.make_model";
  if (lip_g < 0.0) throw ConfigError(where, "lip_g must be >= 0");
  HamiltonianModel m;
  m.family = family;
  m.support = support;
  m.support_eta = support_eta;
  m.lip_g = lip_g;
  switch (family) {
    case Family::KineticWeight:
      if (amplitude < 1.0) throw ConfigError(where, "KineticWeight needs alpha >= 1");
      if (!(width > 0.0)) throw ConfigError(where, "KineticWeight needs rho > 0");
      if (support.empty() && amplitude != 1.0)
        throw ConfigError(where, "KineticWeight needs a hole to carry the weight");
      m.alpha = amplitude;
      m.rho = width;
      break;
    case Family::KineticPlusPotential:
      if (amplitude < 0.0) throw ConfigError(where, "potential amplitude beta must be >= 0");
      if (support.empty() && amplitude != 0.0)
        throw ConfigError(where, "KineticPlusPotential needs a hole to carry the potential");
      m.beta = amplitude;
      m.rho_v = width;
      break;
    case Family::Free:
    case Family::StripeWeight:
      break;
  }

  // A priori bounds: |u_t| <= C_t from the comparison functions g -+ C_t t,
  // then |Du| <= C_x from coercivity.
  const double a_min = m.weight_min(), a_max = m.weight_max(), b_max = m.potential_max();
  const double c_t = a_max * lip_g * lip_g / 2.0 + b_max;
  const double c_x = std::sqrt(2.0 * c_t / a_min);
  m.C0 = overrides.C0.value_or(std::max(c_t + c_x, 1.0));
  if (!(m.C0 > 0.0)) throw ConfigError(where, "C0 must be positive");

  const double R = m.clamp_radius();
  double k0 = b_max;
  if (a_min < 1.0) k0 = std::max(k0, (1.0 - a_min) * R * R / 2.0 + b_max);
  if (a_max > 1.0) k0 = std::max(k0, (a_max - 1.0) * a_max * R * R / 2.0 + b_max);
  if (overrides.K0) {
    if (*overrides.K0 + 1e-12 < k0)
      throw ConfigError(where, "K0 override is smaller than the clamp envelope requires");
    k0 = *overrides.K0;
  }
  m.K0 = k0;

  m.M0 = overrides.M0.value_or(velocity_bound(m, lip_g));
  if (!(m.M0 > 0.0)) throw ConfigError(where, "M0 must be positive");
  return m;
}

double legendre_oracle(const HamiltonianModel& m, const Point2& y, const Point2& v, double p_radius,
                       int n_grid) {
  if (n_grid < 2) throw ConfigError("hamiltonians.legendre_oracle", "n_grid must be >= 2");
  const double step = 2.0 * p_radius / (n_grid - 1);
  const double a = weight(m, y), b = potential(m, y), R = m.clamp_radius();
  double best = -kInf;
  for (int j = 0; j < n_grid; ++j) {
    const double py = -p_radius + j * step;
    for (int i = 0; i < n_grid; ++i) {
      const double px = -p_radius + i * step;
      const double r = std::sqrt(px * px + py * py);
      best = std::max(best, px * v.x() + py * v.y() - clamped_profile(a, b, R, r));
    }
  }
  return best;
}

double legendre_oracle_radius(const HamiltonianModel& m, double v_max) {
  return std::max(m.clamp_radius(), v_max / std::min(m.weight_min(), 1.0)) + 1.0;
}

double legendre_oracle_tolerance(const HamiltonianModel& m, double p_radius, int n_grid) {
  const double step = 2.0 * p_radius / (n_grid - 1);
  // a < 1 leaves a kink at |p| = R where the slope jumps by (1 - a) R; a
  // maximizer sitting on it costs first order in the distance to the grid.
  const double kink = (1.0 - std::min(m.weight_min(), 1.0)) * m.clamp_radius() * step / std::sqrt(2.0);
  return kink + std::max(m.weight_max(), 1.0) * step * step / 4.0 + 1e-12;
}

A5Report check_A5(const HamiltonianModel& m, std::span<const Point2> samples, double tol) {
  if (samples.empty()) throw ConfigError("hamiltonians.check_A5", "samples must be nonempty");
  A5Report rep;
  constexpr int kGrid = 33;
  const double pr = m.clamp_radius();
  for (const Point2& y : samples) {
    const double h0 = eval_H<double>(m, y, Point2::Zero());
    rep.max_abs_H0 = std::max(rep.max_abs_H0, std::abs(h0));
    double hmin = h0;
    for (int j = 0; j < kGrid; ++j)
      for (int i = 0; i < kGrid; ++i) {
        const Point2 p(-pr + 2.0 * pr * i / (kGrid - 1), -pr + 2.0 * pr * j / (kGrid - 1));
        hmin = std::min(hmin, eval_H<double>(m, y, p));
      }
    rep.max_below_zero = std::max(rep.max_below_zero, std::max(0.0, -hmin));
  }
  rep.pass = rep.max_abs_H0 <= tol && rep.max_below_zero <= tol;
  return rep;
}

double velocity_bound(const HamiltonianModel& m, double lip_g) {
  if (lip_g < 0.0) throw ConfigError("hamiltonians.velocity_bound", "lip_g must be >= 0");
  const double c = lip_g + 2.0 * m.K0 + 1.0;
  return c + std::sqrt(c * c + 2.0 * (c + m.K0));
}

}  // namespace hjperf
