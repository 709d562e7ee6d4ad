#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "dsat/plant.hpp"

namespace dsat {

// Single-input rational compensator K * prod(s - z_i) / prod(s - p_j).
// Zeros and poles are real (the three design compensators all are); the
// order must be proper: no more zeros than poles.
struct RationalCompensator {
  double K = 0.0;
  std::vector<double> zeros;
  std::vector<double> poles;

  void validate() const;
};

// Which plant output the loop senses.  The actuated input is always the
// motor voltage channel; the reference enters at the error junction.
enum class SensedOutput { theta_s, p, r };

int sensed_state_index(SensedOutput s);
std::string to_string(SensedOutput s);
SensedOutput sensed_from_string(const std::string& name);

struct FeedbackLoop {
  SensedOutput sensed = SensedOutput::theta_s;
  RationalCompensator compensator;
  std::string actuated_input = "de";
  std::string reference_name = "de_ref";
};

// State-space realization of a compensator in controllable canonical form.
// Biproper compensators (equal zero/pole count) carry the gain in Dc;
// strictly proper ones have Dc = 0.
struct CompensatorRealization {
  Eigen::MatrixXd Ac;  // m x m
  Eigen::VectorXd Bc;  // m
  Eigen::RowVectorXd Cc;  // 1 x m
  double Dc = 0.0;
};

CompensatorRealization realize_compensator(const RationalCompensator& comp);

// Transfer function value of a realization at a complex frequency.
std::complex<double> tf_eval(const CompensatorRealization& real,
                             std::complex<double> s);

// Aggregate closed-loop system.  States are the plant's six followed by one
// block of compensator states per loop, in loop order.  B has two columns:
// the shared reference (fed to every engaged loop's error junction) and the
// plant's delta_n channel.
struct ClosedLoopSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  int n_plant = kNumStates;

  struct LoopBlock {
    int sensed = 0;              // plant state index the loop measures
    int offset = 0;              // first compensator state row in A
    CompensatorRealization real;
  };
  std::vector<LoopBlock> blocks;

  int size() const { return static_cast<int>(A.rows()); }
};

// Closing zero loops returns the bare plant with its voltage column as the
// reference channel, so an open-loop scenario still accepts a drive signal.
ClosedLoopSystem close_loop(const PlantMatrices& plant,
                            const FeedbackLoop& loop);
ClosedLoopSystem close_loops(const PlantMatrices& plant,
                             const std::vector<FeedbackLoop>& loops);

// Static output feedback de = K*(ref - y) closed as the rank-1 update
// A - b1*K*e_s^T.  Reference path for the generic closure to agree with.
Eigen::MatrixXd static_gain_closure(const PlantMatrices& plant,
                                    SensedOutput sensed, double K);

// One eigenvalue with its natural frequency and damping ratio.  Real modes
// report zeta = +1 (stable) or -1 (unstable); a mode at the origin reports
// omega_n = zeta = 0.
struct EigenMode {
  std::complex<double> lambda;
  double omega_n = 0.0;
  double zeta = 0.0;
};

std::vector<EigenMode> eigen_modes(const Eigen::MatrixXd& A);

// Root locus of one loop shape over a gain grid.  Branches are continuous
// in the gain: each slice is matched to the previous one by nearest
// neighbour, so branches[b][g] follows a single eigenvalue as K = gains[g]
// varies.  The closure context is kept so refinement passes can re-close
// the loop at intermediate gains.
struct LocusData {
  std::vector<double> gains;
  std::vector<std::vector<std::complex<double>>> branches;  // [branch][gain]
  PlantMatrices plant;
  FeedbackLoop shape;
};

LocusData root_locus(const PlantMatrices& plant, const FeedbackLoop& shape,
                     const std::vector<double>& gains);

// Logarithmic gain grid from k_min to k_max (both positive magnitudes),
// points_per_decade samples per decade, multiplied by sign.
std::vector<double> log_gain_grid(double k_min, double k_max,
                                  int points_per_decade, double sign = 1.0);

// Gain where a locus branch crosses the imaginary axis, refined by
// bisection on the gain until |Re(lambda)| < 1e-9.  Branches that hug the
// origin at numerical-noise level are structural integrators, not
// crossings, and are ignored.
struct CriticalGain {
  double K = 0.0;
  std::complex<double> s;
};

std::vector<CriticalGain> find_critical_gains(const LocusData& locus);

// Real-axis breakaway/break-in: the gain and location where a pair of
// branches leaves or joins the real axis.
struct BreakawayPoint {
  double K = 0.0;
  double s = 0.0;
};

std::vector<BreakawayPoint> find_breakaway(const LocusData& locus);

RationalCompensator compensator_from_json(const nlohmann::json& j);
nlohmann::json compensator_to_json(const RationalCompensator& c);
FeedbackLoop loop_from_json(const nlohmann::json& j);
nlohmann::json loop_to_json(const FeedbackLoop& l);

}  // namespace dsat
