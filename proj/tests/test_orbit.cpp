#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dsat/orbit.hpp"

using namespace dsat;

namespace {

OrbitElements reference_orbit(double e, double i_deg) {
  OrbitElements el;
  el.a = 8078140.985059326;
  el.e = e;
  el.i = i_deg * std::numbers::pi / 180.0;
  return el;
}

}  // namespace

TEST_CASE("kepler solve on easy cases") {
  CHECK(solve_kepler(1.234, 0.0) == doctest::Approx(1.234).epsilon(1e-15));
  // At M = pi the equation is symmetric and E = pi for any eccentricity.
  for (double e : {0.0, 0.3, 0.9}) {
    CHECK(solve_kepler(std::numbers::pi, e) ==
          doctest::Approx(std::numbers::pi).epsilon(1e-13));
  }
  // Independently computed values.
  CHECK(solve_kepler(std::numbers::pi / 2.0, 0.2) ==
        doctest::Approx(1.7669606079827387).epsilon(1e-13));
  CHECK(solve_kepler(2.5, 0.65) ==
        doctest::Approx(2.748800263604752).epsilon(1e-13));
}

TEST_CASE("kepler residual over random anomalies and eccentricities") {
  std::mt19937 rng(20250817);
  std::uniform_real_distribution<double> m_dist(-50.0, 50.0);
  std::uniform_real_distribution<double> e_dist(0.0, 0.9);
  for (int i = 0; i < 10000; ++i) {
    const double M = m_dist(rng);
    const double e = e_dist(rng);
    const double E = solve_kepler(M, e);
    // Evaluate the residual against the range-reduced anomaly to avoid
    // losing digits to the revolution count.
    const double k =
        std::floor((M + std::numbers::pi) / (2.0 * std::numbers::pi));
    const double Mr = M - 2.0 * std::numbers::pi * k;
    const double Er = E - 2.0 * std::numbers::pi * k;
    CHECK(std::abs(Er - e * std::sin(Er) - Mr) < 1e-12);
    CHECK(std::abs(E - M) < std::numbers::pi + e);
  }
}

TEST_CASE("eccentricity out of range is rejected") {
  CHECK_THROWS_AS(solve_kepler(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_kepler(1.0, -0.1), std::invalid_argument);
  OrbitElements el = reference_orbit(1.2, 0.0);
  CHECK_THROWS_AS(orbital_period(el), std::invalid_argument);
}

TEST_CASE("orbital period matches the design value") {
  const OrbitElements el = reference_orbit(0.2, 30.0);
  CHECK(orbital_period(el) == doctest::Approx(7225.67).epsilon(1e-12));
}

TEST_CASE("momentum constancy and periodicity") {
  const OrbitElements el = reference_orbit(0.2, 30.0);
  const double T = orbital_period(el);
  const OrbitState at0 = propagate(el, 0.0);
  const double h0 = at0.V_theta * at0.R;
  for (double frac : {0.1, 0.37, 0.5, 0.77, 0.93}) {
    const OrbitState s = propagate(el, frac * T);
    CHECK(s.V_theta * s.R == doctest::Approx(h0).epsilon(1e-9));
  }
  // One full revolution returns the radius and rate to 1e-9 relative.
  const OrbitState s1 = propagate(el, 3.0 * T + 1234.5);
  const OrbitState s2 = propagate(el, 1234.5);
  CHECK(s1.R == doctest::Approx(s2.R).epsilon(1e-9));
  CHECK(s1.n == doctest::Approx(s2.n).epsilon(1e-9));
  CHECK(s1.delta_n == doctest::Approx(s2.delta_n).epsilon(1e-9));
}

TEST_CASE("frozen orbit quantities at perigee and apogee") {
  const OrbitElements el = reference_orbit(0.2, 30.0);
  const double T = orbital_period(el);
  const OrbitState peri = propagate(el, 0.0);
  const OrbitState apo = propagate(el, T / 2.0);

  CHECK(peri.V_theta * peri.R ==
        doctest::Approx(55598134347.69768).epsilon(1e-12));
  CHECK(peri.delta_n ==
        doctest::Approx(-4.6167876737166294e-4).epsilon(1e-12));
  CHECK(apo.delta_n ==
        doctest::Approx(2.7790076306280726e-4).epsilon(1e-12));
  // Rate ratio between perigee and apogee is ((1+e)/(1-e))^2.
  CHECK(peri.n / apo.n == doctest::Approx(2.25).epsilon(1e-12));
  const double n0 = -2.0 * std::numbers::pi / T;
  CHECK(n0 == doctest::Approx(-8.695643874103836e-4).epsilon(1e-12));
  CHECK(peri.n - n0 == doctest::Approx(peri.delta_n).epsilon(1e-9));
}

TEST_CASE("delta_n is exactly zero on a circular orbit") {
  const OrbitElements el = reference_orbit(0.0, 0.0);
  for (double t : {0.0, 100.0, 2000.0, 7000.0, 50000.0}) {
    const OrbitState s = propagate(el, t);
    CHECK(s.delta_n == 0.0);
    CHECK(s.R_Zp == 0.0);  // equatorial: no out-of-plane component
  }
}

TEST_CASE("delta_n averages to zero over one period") {
  const OrbitElements el = reference_orbit(0.2, 30.0);
  const double T = orbital_period(el);
  const int n = 20000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += propagate(el, (i + 0.5) * T / n).delta_n;
  }
  const double mean = sum / n;
  const double n0 = 2.0 * std::numbers::pi / T;
  CHECK(std::abs(mean) < 1e-6 * n0);
}

TEST_CASE("out-of-plane component follows inclination and argument") {
  OrbitElements el = reference_orbit(0.2, 30.0);
  el.argp = 0.4;
  const OrbitState s = propagate(el, 1000.0);
  CHECK(s.R_Zp ==
        doctest::Approx(s.R * std::sin(el.i) * std::sin(el.argp + s.nu))
            .epsilon(1e-14));
  CHECK(std::abs(s.R_Zp) <= s.R * std::sin(el.i) + 1e-9);
}

TEST_CASE("gravity-gradient scale is cubic in the radius ratio") {
  const OrbitElements el = reference_orbit(0.2, 30.0);
  const OrbitState peri = propagate(el, 0.0);
  CHECK(gg_scale(peri, el.a) ==
        doctest::Approx(std::pow(el.a / peri.R, 3.0)).epsilon(1e-14));
  // At perigee of an e = 0.2 orbit the stiffness is (1/0.8)^3 above nominal.
  CHECK(gg_scale(peri, el.a) == doctest::Approx(1.0 / 0.512).epsilon(1e-12));
  const OrbitState circ = propagate(reference_orbit(0.0, 0.0), 777.0);
  CHECK(gg_scale(circ, el.a) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("apogee epoch flag shifts the anomaly by half a revolution") {
  OrbitElements el = reference_orbit(0.2, 30.0);
  el.t0_at_perigee = false;
  const OrbitState s = propagate(el, 0.0);
  CHECK(s.R == doctest::Approx(el.a * 1.2).epsilon(1e-12));
}

TEST_CASE("orbit json round trip") {
  OrbitElements el = reference_orbit(0.1, 30.0);
  el.argp = 0.25;
  const OrbitElements back = orbit_from_json(orbit_to_json(el));
  CHECK(back.a == el.a);
  CHECK(back.e == el.e);
  CHECK(back.i == doctest::Approx(el.i).epsilon(1e-15));
  CHECK(back.argp == doctest::Approx(el.argp).epsilon(1e-15));
  CHECK(back.mu == el.mu);
  CHECK(back.t0_at_perigee == el.t0_at_perigee);
}
