#include "dsat/orbit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dsat {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void OrbitElements::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("semi-major axis must be positive");
  }
  if (!(e >= 0.0 && e < 1.0)) {
    throw std::invalid_argument(
        "unsupported orbit: eccentricity must lie in [0, 1)");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("mu must be positive");
  }
  if (!std::isfinite(i) || !std::isfinite(argp)) {
    throw std::invalid_argument("orbit angles must be finite");
  }
}

double solve_kepler(double M, double e) {
  if (!(e >= 0.0 && e < 1.0)) {
    throw std::invalid_argument(
        "unsupported orbit: eccentricity must lie in [0, 1)");
  }
  if (!std::isfinite(M)) {
    throw std::invalid_argument("mean anomaly must be finite");
  }
  // Reduce M into [-pi, pi); the offset is added back at the end so E stays
  // within one revolution of the caller's M.
  const double k = std::floor((M + std::numbers::pi) / kTwoPi);
  const double Mr = M - kTwoPi * k;

  double E = Mr;
  bool converged = false;
  for (int iter = 0; iter < 50; ++iter) {
    const double f = E - e * std::sin(E) - Mr;
    if (std::abs(f) < 1e-13) {
      converged = true;
      break;
    }
    E -= f / (1.0 - e * std::cos(E));
  }
  if (!converged && std::abs(E - e * std::sin(E) - Mr) >= 1e-13) {
    // f(E) = E - e*sin(E) - Mr is strictly increasing, so [Mr - e, Mr + e]
    // brackets the root.
    double lo = Mr - e, hi = Mr + e;
    for (int iter = 0; iter < 200; ++iter) {
      E = 0.5 * (lo + hi);
      const double f = E - e * std::sin(E) - Mr;
      if (std::abs(f) < 1e-13 || hi - lo < 1e-15) break;
      (f > 0.0 ? hi : lo) = E;
    }
  }
  return E + kTwoPi * k;
}

double orbital_period(const OrbitElements& el) {
  el.validate();
  return kTwoPi * std::sqrt(el.a * el.a * el.a / el.mu);
}

OrbitState propagate(const OrbitElements& el, double t) {
  el.validate();
  const double T = kTwoPi * std::sqrt(el.a * el.a * el.a / el.mu);
  double M = kTwoPi * t / T;
  if (!el.t0_at_perigee) M += std::numbers::pi;

  OrbitState s;
  s.t = t;
  s.E = solve_kepler(M, el.e);

  // Work with the reduced anomaly for trig, then restore the revolution
  // count on nu so it is continuous alongside E.
  const double k = std::floor((s.E + std::numbers::pi) / kTwoPi);
  const double Er = s.E - kTwoPi * k;
  const double cosE = std::cos(Er), sinE = std::sin(Er);
  s.R = el.a * (1.0 - el.e * cosE);
  s.nu = 2.0 * std::atan2(std::sqrt(1.0 + el.e) * std::sin(0.5 * Er),
                          std::sqrt(1.0 - el.e) * std::cos(0.5 * Er)) +
         kTwoPi * k;

  const double one_me2 = 1.0 - el.e * el.e;
  const double h = std::sqrt(el.mu * el.a * one_me2);
  s.V_theta = h / s.R;
  s.n = -s.V_theta / s.R;
  // n0 = -2*pi/T = -h / (a^2 sqrt(1 - e^2)), so delta_n shares the factor h
  // with n and vanishes identically on a circular orbit where R = a.  The
  // trailing + 0.0 turns the -h * 0 negative zero into a plain zero.
  s.delta_n = -h * (1.0 / (s.R * s.R) -
                    1.0 / (el.a * el.a * std::sqrt(one_me2))) +
              0.0;
  s.R_Zp = s.R * std::sin(el.i) * std::sin(el.argp + s.nu);
  return s;
}

double gg_scale(const OrbitState& state, double R0) {
  if (!(state.R > 0.0)) {
    throw std::invalid_argument("gg_scale: orbit state has non-positive R");
  }
  const double ratio = R0 / state.R;
  return ratio * ratio * ratio;
}

OrbitElements orbit_from_json(const nlohmann::json& config) {
  OrbitElements el;
  el.a = config.at("a").get<double>();
  el.e = config.at("e").get<double>();
  el.i = config.value("i_deg", 0.0) * std::numbers::pi / 180.0;
  el.argp = config.value("argp_deg", 0.0) * std::numbers::pi / 180.0;
  if (config.contains("mu")) el.mu = config.at("mu").get<double>();
  if (config.contains("t0_at_perigee")) {
    el.t0_at_perigee = config.at("t0_at_perigee").get<bool>();
  }
  el.validate();
  return el;
}

nlohmann::json orbit_to_json(const OrbitElements& el) {
  return {{"a", el.a},
          {"e", el.e},
          {"i_deg", el.i * 180.0 / std::numbers::pi},
          {"argp_deg", el.argp * 180.0 / std::numbers::pi},
          {"mu", el.mu},
          {"t0_at_perigee", el.t0_at_perigee}};
}

}  // namespace dsat
