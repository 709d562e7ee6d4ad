#include "dsat/control.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsat {

void RationalCompensator::validate() const {
  if (!std::isfinite(K)) {
    throw std::invalid_argument("compensator gain must be finite");
  }
  if (zeros.size() > poles.size()) {
    throw std::invalid_argument(
        "improper compensator: more zeros than poles");
  }
  for (double z : zeros) {
    if (!std::isfinite(z)) {
      throw std::invalid_argument("compensator zeros must be finite");
    }
  }
  for (double p : poles) {
    if (!std::isfinite(p)) {
      throw std::invalid_argument("compensator poles must be finite");
    }
  }
}

int sensed_state_index(SensedOutput s) {
  switch (s) {
    case SensedOutput::theta_s:
      return kThetaS;
    case SensedOutput::p:
      return kP;
    case SensedOutput::r:
      return kR;
  }
  throw std::invalid_argument("unknown sensed output");
}

std::string to_string(SensedOutput s) {
  switch (s) {
    case SensedOutput::theta_s:
      return "theta_s";
    case SensedOutput::p:
      return "p";
    case SensedOutput::r:
      return "r";
  }
  throw std::invalid_argument("unknown sensed output");
}

SensedOutput sensed_from_string(const std::string& name) {
  if (name == "theta_s") return SensedOutput::theta_s;
  if (name == "p") return SensedOutput::p;
  if (name == "r") return SensedOutput::r;
  throw std::invalid_argument("unknown sensed output \"" + name +
                              "\" (expected theta_s, p, or r)");
}

namespace {

// Monic polynomial coefficients from real roots, ascending powers:
// c[0] + c[1] s + ... + c[n] s^n with c[n] = 1.
std::vector<double> poly_from_roots(const std::vector<double>& roots) {
  std::vector<double> c{1.0};
  for (double r : roots) {
    c.push_back(0.0);
    for (int i = static_cast<int>(c.size()) - 1; i > 0; --i) {
      c[i] = c[i - 1] - r * c[i];
    }
    c[0] *= -r;
  }
  return c;
}

}  // namespace

CompensatorRealization realize_compensator(const RationalCompensator& comp) {
  comp.validate();
  const int m = static_cast<int>(comp.poles.size());
  CompensatorRealization real;
  real.Ac = Eigen::MatrixXd::Zero(m, m);
  real.Bc = Eigen::VectorXd::Zero(m);
  real.Cc = Eigen::RowVectorXd::Zero(m);
  if (m == 0) {
    real.Dc = comp.K;  // pure gain
    return real;
  }

  const std::vector<double> den = poly_from_roots(comp.poles);
  std::vector<double> num = poly_from_roots(comp.zeros);
  num.resize(m + 1, 0.0);  // pad to denominator order

  // Controllable canonical form: shift chain with the denominator on the
  // bottom row, input entering the last state.
  for (int i = 0; i + 1 < m; ++i) real.Ac(i, i + 1) = 1.0;
  for (int j = 0; j < m; ++j) real.Ac(m - 1, j) = -den[j];
  real.Bc(m - 1) = 1.0;

  if (comp.zeros.size() == comp.poles.size()) {
    // Biproper: K*num/den = K + K*(num - den)/den.
    real.Dc = comp.K;
    for (int j = 0; j < m; ++j) real.Cc(j) = comp.K * (num[j] - den[j]);
  } else {
    real.Dc = 0.0;
    for (int j = 0; j < m; ++j) real.Cc(j) = comp.K * num[j];
  }
  return real;
}

std::complex<double> tf_eval(const CompensatorRealization& real,
                             std::complex<double> s) {
  const int m = static_cast<int>(real.Ac.rows());
  if (m == 0) return real.Dc;
  Eigen::MatrixXcd sIA = s * Eigen::MatrixXcd::Identity(m, m) -
                         real.Ac.cast<std::complex<double>>();
  Eigen::VectorXcd x = sIA.partialPivLu().solve(
      real.Bc.cast<std::complex<double>>());
  return (real.Cc.cast<std::complex<double>>() * x)(0) + real.Dc;
}

ClosedLoopSystem close_loops(const PlantMatrices& plant,
                             const std::vector<FeedbackLoop>& loops) {
  if (plant.A.rows() != kNumStates || plant.A.cols() != kNumStates ||
      plant.B.rows() != kNumStates || plant.B.cols() != kNumInputs) {
    throw std::invalid_argument("close_loops: plant must be 6x6 / 6x2");
  }
  const int n = kNumStates;
  int total = n;
  std::vector<CompensatorRealization> reals;
  reals.reserve(loops.size());
  for (const FeedbackLoop& loop : loops) {
    reals.push_back(realize_compensator(loop.compensator));
    total += static_cast<int>(reals.back().Ac.rows());
  }

  ClosedLoopSystem sys;
  sys.A = Eigen::MatrixXd::Zero(total, total);
  sys.B = Eigen::MatrixXd::Zero(total, kNumInputs);
  sys.A.topLeftCorner(n, n) = plant.A;
  sys.B.col(1).head(n) = plant.B.col(1);
  const Eigen::VectorXd b1 = plant.B.col(0);
  if (loops.empty()) {
    sys.B.col(0).head(n) = b1;  // open loop: the reference is de itself
    return sys;
  }

  // Every loop sums into the single actuation channel:
  //   de = sum_i (Cc_i xc_i + Dc_i (ref - y_i)),  y_i = x[sensed_i].
  int offset = n;
  for (size_t i = 0; i < loops.size(); ++i) {
    const CompensatorRealization& r = reals[i];
    const int m = static_cast<int>(r.Ac.rows());
    const int si = sensed_state_index(loops[i].sensed);

    sys.A.col(si).head(n) -= b1 * r.Dc;           // direct-feed term
    if (m > 0) {
      sys.A.block(0, offset, n, m) = b1 * r.Cc;   // compensator output
      sys.A.block(offset, 0, m, n).col(si) = -r.Bc;
      sys.A.block(offset, offset, m, m) = r.Ac;
      sys.B.col(0).segment(offset, m) = r.Bc;     // ref into the junction
    }
    sys.B.col(0).head(n) += b1 * r.Dc;

    sys.blocks.push_back({si, offset, r});
    offset += m;
  }
  return sys;
}

ClosedLoopSystem close_loop(const PlantMatrices& plant,
                            const FeedbackLoop& loop) {
  return close_loops(plant, std::vector<FeedbackLoop>{loop});
}

Eigen::MatrixXd static_gain_closure(const PlantMatrices& plant,
                                    SensedOutput sensed, double K) {
  Eigen::MatrixXd A = plant.A;
  A.col(sensed_state_index(sensed)) -= plant.B.col(0) * K;
  return A;
}

std::vector<EigenMode> eigen_modes(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue computation failed to converge");
  }
  std::vector<EigenMode> modes;
  modes.reserve(A.rows());
  for (int i = 0; i < A.rows(); ++i) {
    EigenMode m;
    m.lambda = solver.eigenvalues()(i);
    const double mag = std::abs(m.lambda);
    if (mag == 0.0) {
      m.omega_n = 0.0;
      m.zeta = 0.0;
    } else if (m.lambda.imag() == 0.0) {
      m.omega_n = mag;
      m.zeta = m.lambda.real() < 0.0 ? 1.0 : -1.0;
    } else {
      m.omega_n = mag;
      m.zeta = -m.lambda.real() / mag;
    }
    modes.push_back(m);
  }
  std::sort(modes.begin(), modes.end(),
            [](const EigenMode& a, const EigenMode& b) {
              if (a.lambda.real() != b.lambda.real()) {
                return a.lambda.real() < b.lambda.real();
              }
              return a.lambda.imag() < b.lambda.imag();
            });
  return modes;
}

namespace {

std::vector<std::complex<double>> closed_eigs(const PlantMatrices& plant,
                                              const FeedbackLoop& shape,
                                              double K) {
  FeedbackLoop loop = shape;
  loop.compensator.K = K;
  ClosedLoopSystem sys = close_loop(plant, loop);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(sys.A, false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue computation failed to converge");
  }
  std::vector<std::complex<double>> eigs(solver.eigenvalues().size());
  for (int i = 0; i < solver.eigenvalues().size(); ++i) {
    eigs[i] = solver.eigenvalues()(i);
  }
  return eigs;
}

// Matches the new slice onto the previous branch ordering, globally
// greedy by distance so conjugate pairs stay locked to their branches.
std::vector<std::complex<double>> match_slice(
    const std::vector<std::complex<double>>& prev,
    std::vector<std::complex<double>> curr) {
  const size_t n = prev.size();
  struct Pair {
    double d;
    size_t i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(n * n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      pairs.push_back({std::abs(prev[i] - curr[j]), i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<std::complex<double>> out(n);
  std::vector<bool> used_i(n, false), used_j(n, false);
  for (const Pair& p : pairs) {
    if (used_i[p.i] || used_j[p.j]) continue;
    used_i[p.i] = used_j[p.j] = true;
    out[p.i] = curr[p.j];
  }
  return out;
}

// Canonical initial ordering so locus output is deterministic.
void sort_slice(std::vector<std::complex<double>>& eigs) {
  std::sort(eigs.begin(), eigs.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() < b.real();
              return a.imag() < b.imag();
            });
}

}  // namespace

LocusData root_locus(const PlantMatrices& plant, const FeedbackLoop& shape,
                     const std::vector<double>& gains) {
  if (gains.empty()) {
    throw std::invalid_argument("root locus needs a non-empty gain grid");
  }
  for (double g : gains) {
    if (!std::isfinite(g)) {
      throw std::invalid_argument("root locus gains must be finite");
    }
  }
  LocusData locus;
  locus.gains = gains;
  locus.plant = plant;
  locus.shape = shape;

  std::vector<std::complex<double>> prev = closed_eigs(plant, shape, gains[0]);
  sort_slice(prev);
  const size_t nb = prev.size();
  locus.branches.assign(nb, {});
  for (size_t b = 0; b < nb; ++b) locus.branches[b].push_back(prev[b]);

  for (size_t g = 1; g < gains.size(); ++g) {
    std::vector<std::complex<double>> curr =
        match_slice(prev, closed_eigs(plant, shape, gains[g]));
    for (size_t b = 0; b < nb; ++b) locus.branches[b].push_back(curr[b]);
    prev = std::move(curr);
  }
  return locus;
}

std::vector<double> log_gain_grid(double k_min, double k_max,
                                  int points_per_decade, double sign) {
  if (!(k_min > 0.0) || !(k_max > k_min) || points_per_decade < 1) {
    throw std::invalid_argument(
        "gain grid needs 0 < k_min < k_max and points_per_decade >= 1");
  }
  const double lo = std::log10(k_min), hi = std::log10(k_max);
  const int n = static_cast<int>(std::ceil((hi - lo) * points_per_decade)) + 1;
  std::vector<double> grid;
  grid.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / (n - 1);
    grid.push_back(sign * std::pow(10.0, lo + f * (hi - lo)));
  }
  return grid;
}

namespace {

// A branch whose magnitude never leaves numerical-noise territory is a
// structural integrator; its real part flickers around zero without
// meaning.
constexpr double kStructuralZeroTol = 1e-8;
constexpr double kCrossingReTol = 1e-9;

std::complex<double> track_eig(const std::vector<std::complex<double>>& eigs,
                               std::complex<double> guess) {
  std::complex<double> best = eigs[0];
  double bd = std::abs(eigs[0] - guess);
  for (const auto& e : eigs) {
    const double d = std::abs(e - guess);
    if (d < bd) {
      bd = d;
      best = e;
    }
  }
  return best;
}

}  // namespace

std::vector<CriticalGain> find_critical_gains(const LocusData& locus) {
  std::vector<CriticalGain> out;
  const size_t ng = locus.gains.size();
  for (const auto& branch : locus.branches) {
    for (size_t g = 0; g + 1 < ng; ++g) {
      const std::complex<double> s0 = branch[g], s1 = branch[g + 1];
      if (std::abs(s0) < kStructuralZeroTol &&
          std::abs(s1) < kStructuralZeroTol) {
        continue;
      }
      const double r0 = s0.real(), r1 = s1.real();
      if (r0 == 0.0 || r1 == 0.0 || (r0 > 0.0) == (r1 > 0.0)) continue;
      if (std::max(std::abs(r0), std::abs(r1)) <= 10 * kCrossingReTol) {
        continue;
      }

      // Bisect the gain interval, following this branch by nearest
      // neighbour from the interval endpoints inward.
      double k_lo = locus.gains[g], k_hi = locus.gains[g + 1];
      std::complex<double> e_lo = s0, e_hi = s1;
      CriticalGain found{0.0, {0.0, 0.0}};
      for (int iter = 0; iter < 200; ++iter) {
        const double k_mid = 0.5 * (k_lo + k_hi);
        const std::complex<double> guess = 0.5 * (e_lo + e_hi);
        const std::complex<double> e_mid = track_eig(
            closed_eigs(locus.plant, locus.shape, k_mid), guess);
        found = {k_mid, e_mid};
        if (std::abs(e_mid.real()) < kCrossingReTol) break;
        if ((e_mid.real() > 0.0) == (r0 > 0.0)) {
          k_lo = k_mid;
          e_lo = e_mid;
        } else {
          k_hi = k_mid;
          e_hi = e_mid;
        }
        if (std::abs(k_hi - k_lo) <=
            1e-15 * std::max(std::abs(k_lo), std::abs(k_hi))) {
          break;
        }
      }
      // One crossing shows up on both members of a conjugate pair; keep one.
      bool dup = false;
      for (const CriticalGain& c : out) {
        if (std::abs(c.K - found.K) <=
                1e-6 * std::max(std::abs(c.K), 1e-300) &&
            std::abs(c.s.imag() + found.s.imag()) <=
                1e-6 * std::max(std::abs(c.s.imag()), 1.0)) {
          dup = true;
          break;
        }
        if (std::abs(c.K - found.K) <=
                1e-6 * std::max(std::abs(c.K), 1e-300) &&
            std::abs(c.s - found.s) <= 1e-6 * std::max(std::abs(c.s), 1.0)) {
          dup = true;
          break;
        }
      }
      if (!dup) out.push_back(found);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const CriticalGain& a, const CriticalGain& b) {
              return std::abs(a.K) < std::abs(b.K);
            });
  return out;
}

std::vector<BreakawayPoint> find_breakaway(const LocusData& locus) {
  constexpr double kImTol = 1e-9;
  std::vector<BreakawayPoint> out;
  const size_t ng = locus.gains.size();
  for (const auto& branch : locus.branches) {
    for (size_t g = 0; g + 1 < ng; ++g) {
      const std::complex<double> s0 = branch[g], s1 = branch[g + 1];
      if (std::abs(s0) < kStructuralZeroTol &&
          std::abs(s1) < kStructuralZeroTol) {
        continue;
      }
      const bool real0 = std::abs(s0.imag()) <= kImTol;
      const bool real1 = std::abs(s1.imag()) <= kImTol;
      if (real0 == real1) continue;

      double k_lo = locus.gains[g], k_hi = locus.gains[g + 1];
      std::complex<double> e_lo = s0, e_hi = s1;
      for (int iter = 0; iter < 100; ++iter) {
        const double k_mid = 0.5 * (k_lo + k_hi);
        const std::complex<double> guess = 0.5 * (e_lo + e_hi);
        const std::complex<double> e_mid = track_eig(
            closed_eigs(locus.plant, locus.shape, k_mid), guess);
        if ((std::abs(e_mid.imag()) <= kImTol) == real0) {
          k_lo = k_mid;
          e_lo = e_mid;
        } else {
          k_hi = k_mid;
          e_hi = e_mid;
        }
        if (std::abs(k_hi - k_lo) <=
            1e-12 * std::max(std::abs(k_lo), std::abs(k_hi))) {
          break;
        }
      }
      BreakawayPoint pt{0.5 * (k_lo + k_hi), 0.5 * (e_lo.real() + e_hi.real())};
      bool dup = false;
      for (const BreakawayPoint& b : out) {
        if (std::abs(b.K - pt.K) <= 1e-6 * std::max(std::abs(b.K), 1e-300) &&
            std::abs(b.s - pt.s) <= 1e-6 * std::max(std::abs(b.s), 1e-12)) {
          dup = true;
          break;
        }
      }
      if (!dup) out.push_back(pt);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const BreakawayPoint& a, const BreakawayPoint& b) {
              return std::abs(a.K) < std::abs(b.K);
            });
  return out;
}

RationalCompensator compensator_from_json(const nlohmann::json& j) {
  RationalCompensator c;
  c.K = j.at("K").get<double>();
  if (j.contains("zeros")) c.zeros = j.at("zeros").get<std::vector<double>>();
  if (j.contains("poles")) c.poles = j.at("poles").get<std::vector<double>>();
  c.validate();
  return c;
}

nlohmann::json compensator_to_json(const RationalCompensator& c) {
  return {{"K", c.K}, {"zeros", c.zeros}, {"poles", c.poles}};
}

FeedbackLoop loop_from_json(const nlohmann::json& j) {
  FeedbackLoop l;
  l.sensed = sensed_from_string(j.at("loop").get<std::string>());
  l.compensator = compensator_from_json(j);
  return l;
}

nlohmann::json loop_to_json(const FeedbackLoop& l) {
  nlohmann::json j = compensator_to_json(l.compensator);
  j["loop"] = to_string(l.sensed);
  return j;
}

}  // namespace dsat
