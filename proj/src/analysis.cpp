#include "dsat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsat {

namespace {

void check_trace(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.empty() || t.size() != y.size()) {
    throw std::invalid_argument(
        "trace must be non-empty with matching time and value lengths");
  }
}

}  // namespace

std::optional<double> settling_time(const std::vector<double>& t,
                                    const std::vector<double>& y,
                                    double band) {
  check_trace(t, y);
  if (!(band >= 0.0)) {
    throw std::invalid_argument("settling band must be non-negative");
  }
  // Walk backwards to the last sample outside the band; the trace has
  // settled from the next sample on.
  for (size_t i = t.size(); i-- > 0;) {
    if (std::abs(y[i]) > band) {
      if (i + 1 == t.size()) return std::nullopt;  // still outside at the end
      return t[i + 1];
    }
  }
  return t.front();  // never left the band
}

std::optional<double> settling_time_fraction(const std::vector<double>& t,
                                             const std::vector<double>& y,
                                             double fraction) {
  check_trace(t, y);
  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  return settling_time(t, y, fraction * peak);
}

std::pair<double, double> envelope(const std::vector<double>& t,
                                   const std::vector<double>& y, double t_lo,
                                   double t_hi) {
  check_trace(t, y);
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!any) {
      lo = hi = y[i];
      any = true;
    } else {
      lo = std::min(lo, y[i]);
      hi = std::max(hi, y[i]);
    }
  }
  if (!any) {
    throw std::invalid_argument("envelope window contains no samples");
  }
  return {lo, hi};
}

std::optional<double> dominant_period(const std::vector<double>& t,
                                      const std::vector<double>& y) {
  check_trace(t, y);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());

  // Zero crossings of the mean-removed signal, with linear interpolation
  // for the crossing instants.
  std::vector<double> crossings;
  double prev = y[0] - mean;
  for (size_t i = 1; i < y.size(); ++i) {
    const double cur = y[i] - mean;
    if ((prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0)) {
      const double frac = prev / (prev - cur);
      crossings.push_back(t[i - 1] + frac * (t[i] - t[i - 1]));
    }
    if (cur != 0.0) prev = cur;
  }
  if (crossings.size() < 4) return std::nullopt;
  const double mean_spacing = (crossings.back() - crossings.front()) /
                              static_cast<double>(crossings.size() - 1);
  return 2.0 * mean_spacing;
}

PointingCheck pointing_check(const std::vector<double>& y_deg,
                             double budget_deg) {
  if (y_deg.empty()) {
    throw std::invalid_argument("pointing check needs a non-empty trace");
  }
  PointingCheck c;
  c.limit_deg = budget_deg;
  for (double v : y_deg) c.peak_deg = std::max(c.peak_deg, std::abs(v));
  c.margin_deg = budget_deg - c.peak_deg;
  c.pass = c.margin_deg >= 0.0;
  return c;
}

ResponseMetrics analyze_response(const std::vector<double>& t,
                                 const std::vector<double>& y_deg,
                                 double band_fraction, double window_lo,
                                 double window_hi, double budget_deg) {
  check_trace(t, y_deg);
  ResponseMetrics m;
  for (double v : y_deg) m.peak_deg = std::max(m.peak_deg, std::abs(v));
  m.settling_time_s = settling_time(t, y_deg, band_fraction * m.peak_deg);
  const double lo = std::max(window_lo, t.front());
  const double hi = std::min(window_hi, t.back());
  m.envelope_deg = envelope(t, y_deg, lo, hi);
  m.dominant_period_s = dominant_period(t, y_deg);
  m.budget = pointing_check(y_deg, budget_deg);
  return m;
}

nlohmann::json metrics_to_json(const ResponseMetrics& m) {
  nlohmann::json j;
  if (m.settling_time_s) {
    j["settling_time_s"] = *m.settling_time_s;
  } else {
    j["settling_time_s"] = nullptr;
  }
  j["peak_deg"] = m.peak_deg;
  j["envelope_deg"] = {m.envelope_deg.first, m.envelope_deg.second};
  if (m.dominant_period_s) {
    j["dominant_period_s"] = *m.dominant_period_s;
  } else {
    j["dominant_period_s"] = nullptr;
  }
  j["budget"] = {{"limit_deg", m.budget.limit_deg},
                 {"pass", m.budget.pass},
                 {"margin_deg", m.budget.margin_deg}};
  return j;
}

}  // namespace dsat
