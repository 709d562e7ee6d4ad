#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsat/control.hpp"
#include "dsat/orbit.hpp"
#include "dsat/plant.hpp"

namespace dsat {

// Reference-input shapes.  Amplitude is in volts on the de_ref channel.
// A doublet holds +amplitude on [t_start, t_half) and -amplitude on
// [t_half, t_end); a step turns on at t_start; an impulse is a one-bin
// pulse of area amplitude*dt, i.e. value amplitude across a single step.
struct InputSignal {
  enum class Kind { zero, step, impulse, doublet };
  Kind kind = Kind::zero;
  double amplitude = 0.0;
  double t_start = 0.0;
  double t_half = 0.0;
  double t_end = 0.0;

  void validate() const;
};

std::function<double(double)> make_input(const InputSignal& sig, double dt);

// Which orbit-driven couplings are live during a run.  All three default
// on; switching them off individually isolates their contributions.
struct TimeVaryingFlags {
  bool kinematic_dn = true;  // delta_n(t) into the attitude kinematics
  bool b_channel_dn = true;  // delta_n(t) driving the dn input column
  bool gg_scaling = true;    // gravity-gradient stiffness scaled by (R0/R)^3
};

struct Scenario {
  std::string name;
  PlantMatrices plant;
  std::vector<FeedbackLoop> loops;
  OrbitElements orbit;
  InputSignal input;
  TimeVaryingFlags flags;
  double duration = 0.0;
  double dt = 0.01;
  double R0 = 0.0;  // gravity-gradient reference radius; 0 means orbit.a
  std::array<double, kNumStates> x0{};  // plant initial state, rad & rad/s

  // Optional hook for experiments: called after the standard orbit-driven
  // patches with the current time, orbit state, and the plant block of the
  // system matrix, free to modulate further elements.
  std::function<void(double, const OrbitState&,
                     Eigen::Ref<Eigen::MatrixXd>)>
      element_modulation;
};

// Instantaneous system matrices at time t: the closed-loop pair with the
// scenario's orbit-driven element patches applied.
void system_at(const Scenario& scenario, double t, Eigen::MatrixXd& A,
               Eigen::MatrixXd& B);

// Classical fixed-step RK4 stage for x' = A(t) x + B(t) u(t), with the
// matrices re-evaluated at t, t + dt/2, and t + dt.
Eigen::VectorXd step_rk4(
    const std::function<void(double, Eigen::MatrixXd&, Eigen::MatrixXd&)>&
        system,
    const Eigen::VectorXd& x, double t, double dt,
    const std::function<Eigen::Vector2d(double)>& u);

struct SimulationResult {
  std::vector<double> t;
  // One row per sample: six plant states then compensator states.
  Eigen::MatrixXd X;
  std::vector<double> de_applied;  // actuation after the compensators
  std::vector<double> dn_applied;  // dn channel input actually fed in
  Scenario scenario;
  ClosedLoopSystem closed;
  bool diverged = false;
  double t_diverged = 0.0;

  int samples() const { return static_cast<int>(t.size()); }
};

// Integrates the scenario from 0 to duration on a uniform grid.  On
// divergence (non-finite state) the trace up to the last finite sample is
// retained and the result is flagged; callers decide whether that is an
// error.
SimulationResult simulate(const Scenario& scenario);

Scenario scenario_from_json(const nlohmann::json& config);
nlohmann::json scenario_to_json(const Scenario& scenario);

}  // namespace dsat
