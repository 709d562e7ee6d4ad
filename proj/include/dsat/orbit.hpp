#pragma once

#include <json.hpp>

namespace dsat {

// Keplerian elements of the reference orbit.  Angles in radians; mu in
// m^3/s^2.  t0_at_perigee selects whether the epoch t = 0 sits at perigee
// (the default) or at apogee.
struct OrbitElements {
  double a = 0.0;     // semi-major axis, m
  double e = 0.0;     // eccentricity, [0, 1)
  double i = 0.0;     // inclination, rad
  double argp = 0.0;  // argument of perigee, rad
  double mu = 3.986004418e14;
  bool t0_at_perigee = true;

  void validate() const;
};

// Orbit state sampled at time t, carrying exactly the quantities the
// attitude model consumes.
struct OrbitState {
  double t = 0.0;
  double E = 0.0;        // eccentric anomaly, rad
  double nu = 0.0;       // true anomaly, rad
  double R = 0.0;        // radius, m
  double V_theta = 0.0;  // transverse velocity, m/s
  double n = 0.0;        // instantaneous orbit rate, -V_theta/R, rad/s
  double delta_n = 0.0;  // n - n0 where n0 = -2*pi/T
  double R_Zp = 0.0;     // out-of-plane radius component, m
};

// Solves Kepler's equation E - e*sin(E) = M.  Newton iteration seeded with
// the range-reduced M; falls back to bisection if Newton has not converged
// after 50 iterations.  The result stays within one revolution of M.
// Residual |E - e*sin(E) - M| < 1e-12 guaranteed for e in [0, 1).
double solve_kepler(double M, double e);

double orbital_period(const OrbitElements& el);

OrbitState propagate(const OrbitElements& el, double t);

// Gravity-gradient stiffness scaling (R0/R)^3 for the state's radius.
double gg_scale(const OrbitState& state, double R0);

OrbitElements orbit_from_json(const nlohmann::json& config);
nlohmann::json orbit_to_json(const OrbitElements& el);

}  // namespace dsat
