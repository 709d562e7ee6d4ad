#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

namespace dsat {

// Pointing budget the yaw excursion is judged against, degrees.
constexpr double kPointingBudgetDeg = 0.047;

// Earliest time t* after which |y| stays within the band for the rest of
// the trace.  Returns nullopt when the signal is still outside the band at
// the final sample.  A trace that never leaves the band settles at t[0].
std::optional<double> settling_time(const std::vector<double>& t,
                                    const std::vector<double>& y,
                                    double band);

// Convenience: band as a fraction of the peak magnitude (default 5%).
std::optional<double> settling_time_fraction(const std::vector<double>& t,
                                             const std::vector<double>& y,
                                             double fraction = 0.05);

// Exact sample min/max over the window [t_lo, t_hi].
std::pair<double, double> envelope(const std::vector<double>& t,
                                   const std::vector<double>& y, double t_lo,
                                   double t_hi);

// Dominant oscillation period: twice the mean spacing of the
// mean-removed signal's zero crossings.  Needs at least four crossings to
// call the signal oscillatory; otherwise nullopt.
std::optional<double> dominant_period(const std::vector<double>& t,
                                      const std::vector<double>& y);

struct PointingCheck {
  double limit_deg = kPointingBudgetDeg;
  double peak_deg = 0.0;
  double margin_deg = 0.0;
  bool pass = false;
};

PointingCheck pointing_check(const std::vector<double>& y_deg,
                             double budget_deg = kPointingBudgetDeg);

struct ResponseMetrics {
  std::optional<double> settling_time_s;
  double peak_deg = 0.0;
  std::pair<double, double> envelope_deg{0.0, 0.0};
  std::optional<double> dominant_period_s;
  PointingCheck budget;
};

// Full metric set for one angle trace (degrees).  band_fraction sets the
// settling band relative to the peak; the envelope is taken over
// [window_lo, window_hi] clamped to the trace.
ResponseMetrics analyze_response(const std::vector<double>& t,
                                 const std::vector<double>& y_deg,
                                 double band_fraction = 0.05,
                                 double window_lo = 0.0,
                                 double window_hi = 1e300,
                                 double budget_deg = kPointingBudgetDeg);

nlohmann::json metrics_to_json(const ResponseMetrics& m);

}  // namespace dsat
