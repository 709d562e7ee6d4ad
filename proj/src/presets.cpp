#include "dsat/presets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dsat {
namespace {

// Reference orbit: 7225.67 s period at the standard gravitational
// parameter, epoch at perigee.
constexpr double kSemiMajorAxis = 8078140.985059326;  // m
constexpr double kOrbitPeriod = 7225.67;              // s
constexpr double kLongDuration = 10.0 * kOrbitPeriod;
constexpr double kShortDuration = 500.0;
constexpr double kShortDt = 0.01;
constexpr double kLongDt = 0.1;

// Reference doublet on de_ref: the published responses are for a small
// voltage doublet; 1.5 mV with 5 s legs puts the pitch peak near 0.22 deg.
constexpr double kDoubletAmplitude = 1.5e-3;  // V

PlantMatrices short_horizon_plant() {
  PlantMatrices plant;
  plant.A = Eigen::MatrixXd::Zero(kNumStates, kNumStates);
  plant.B = Eigen::MatrixXd::Zero(kNumStates, kNumInputs);
  plant.A(kP, kR) = 3.7113;
  plant.A(kQ, kP) = 0.49773;
  plant.A(kQ, kQ) = -9.7138e-4;
  plant.A(kQ, kR) = -3.4402e-5;
  plant.A(kR, kP) = -4.0326;
  plant.A(kR, kQ) = 3.3636e-5;
  plant.A(kR, kR) = -1.1912e-6;
  plant.A(kPhiS, kP) = 1.0;
  plant.A(kThetaS, kQ) = 1.0;
  plant.A(kPsiS, kR) = 1.0;
  plant.B(kQ, 0) = -5.1218e-4;
  plant.B(kR, 0) = 1.7735e-5;
  plant.B(kThetaS, 1) = 1.0;
  plant.gg_enabled = false;
  plant.delta_n0 = 0.0;
  return plant;
}

PlantMatrices orbit_horizon_plant() {
  PlantMatrices plant = short_horizon_plant();
  plant.A(kP, kPhiS) = -6.1872e-7;
  plant.A(kQ, kThetaS) = 7.2937e-7;
  plant.A(kR, kThetaS) = -1.3422e-7;
  plant.gg_enabled = true;
  return plant;
}

FeedbackLoop pitch_loop() {
  FeedbackLoop loop;
  loop.sensed = SensedOutput::theta_s;
  loop.compensator = {-29800.0, {-0.498}, {-1.0}};
  return loop;
}

FeedbackLoop roll_rate_loop() {
  FeedbackLoop loop;
  loop.sensed = SensedOutput::p;
  loop.compensator = {1.5e6, {-4.1}, {-25.9, -2.63}};
  return loop;
}

FeedbackLoop yaw_rate_loop() {
  FeedbackLoop loop;
  loop.sensed = SensedOutput::r;
  loop.compensator = {3.0e5, {}, {}};
  return loop;
}

OrbitElements orbit_at(double e, double i_deg) {
  OrbitElements el;
  el.a = kSemiMajorAxis;
  el.e = e;
  el.i = i_deg * std::numbers::pi / 180.0;
  el.argp = 0.0;
  return el;
}

InputSignal reference_doublet() {
  InputSignal sig;
  sig.kind = InputSignal::Kind::doublet;
  sig.amplitude = kDoubletAmplitude;
  sig.t_start = 10.0;
  sig.t_half = 15.0;
  sig.t_end = 20.0;
  return sig;
}

enum class Axis { longitudinal, lateral, directional };

Scenario base_scenario(Axis axis) {
  Scenario sc;
  if (axis == Axis::longitudinal) {
    sc.plant = short_horizon_plant();
    sc.loops = {pitch_loop()};
  } else {
    // Roll and yaw are cross-coupled; the two lateral-directional loops
    // run together as designed.
    sc.plant = orbit_horizon_plant();
    sc.loops = {roll_rate_loop(), yaw_rate_loop()};
  }
  sc.input = reference_doublet();
  return sc;
}

std::string axis_name(Axis axis) {
  switch (axis) {
    case Axis::longitudinal:
      return "longitudinal";
    case Axis::lateral:
      return "lateral";
    case Axis::directional:
      return "directional";
  }
  return {};
}

std::string angle_of(Axis axis) {
  switch (axis) {
    case Axis::longitudinal:
      return "theta_s_deg";
    case Axis::lateral:
      return "phi_s_deg";
    case Axis::directional:
      return "psi_s_deg";
  }
  return {};
}

std::string trim_number(double v) {
  std::string s = std::to_string(v);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

ScenarioGroup sweep_group(Axis axis, bool e_sweep, bool long_horizon) {
  ScenarioGroup group;
  group.name = axis_name(axis) + (e_sweep ? "-esweep" : "-isweep") +
               (long_horizon ? "-long" : "-short");
  group.angle_of_interest = angle_of(axis);

  struct Point {
    double e, i_deg;
    std::string tag;
  };
  std::vector<Point> points;
  if (e_sweep) {
    for (double e : {0.0, 0.1, 0.2}) {
      points.push_back({e, 30.0, "e" + trim_number(e)});
    }
  } else {
    for (double i_deg : {0.0, 30.0}) {
      points.push_back({0.2, i_deg, "i" + trim_number(i_deg)});
    }
  }

  for (const Point& pt : points) {
    Scenario sc = base_scenario(axis);
    sc.orbit = orbit_at(pt.e, pt.i_deg);
    sc.duration = long_horizon ? kLongDuration : kShortDuration;
    sc.dt = long_horizon ? kLongDt : kShortDt;
    if (long_horizon) {
      // The ten-period runs isolate the orbit-driven oscillation; the
      // doublet transient would bury the micro-degree envelope.
      sc.input = InputSignal{};
    }
    sc.name = group.name + "-" + pt.tag;
    group.members.push_back(std::move(sc));
  }
  return group;
}

std::vector<ScenarioGroup> build_groups() {
  std::vector<ScenarioGroup> groups;
  for (Axis axis :
       {Axis::longitudinal, Axis::lateral, Axis::directional}) {
    for (bool e_sweep : {true, false}) {
      for (bool long_horizon : {false, true}) {
        groups.push_back(sweep_group(axis, e_sweep, long_horizon));
      }
    }
  }

  // Pitch-attitude recovery from an initial offset, no reference input.
  {
    ScenarioGroup group;
    group.name = "pitch-recovery";
    group.angle_of_interest = "theta_s_deg";
    Scenario sc = base_scenario(Axis::longitudinal);
    sc.input = InputSignal{};
    sc.orbit = orbit_at(0.2, 30.0);
    sc.duration = kShortDuration;
    sc.dt = kShortDt;
    sc.x0[kThetaS] = -1.5 * std::numbers::pi / 180.0;
    sc.name = group.name;
    group.members.push_back(std::move(sc));
    groups.push_back(std::move(group));
  }

  // Uncontrolled counterpart of the lateral long-horizon study: same plant
  // and orbit forcing with the loops disengaged.
  {
    ScenarioGroup group;
    group.name = "lateral-open-long";
    group.angle_of_interest = "phi_s_deg";
    Scenario sc;
    sc.plant = orbit_horizon_plant();
    sc.orbit = orbit_at(0.2, 30.0);
    sc.duration = kLongDuration;
    sc.dt = kLongDt;
    sc.name = group.name;
    group.members.push_back(std::move(sc));
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace

std::vector<std::string> plant_preset_names() {
  return {"paper-longitudinal", "paper-lateral", "paper-directional"};
}

PlantMatrices plant_preset(const std::string& name) {
  if (name == "paper-longitudinal") return short_horizon_plant();
  if (name == "paper-lateral" || name == "paper-directional") {
    return orbit_horizon_plant();
  }
  throw std::invalid_argument("unknown plant preset \"" + name + "\"");
}

std::vector<std::string> loop_preset_names() {
  return {"paper-longitudinal", "paper-lateral", "paper-directional"};
}

FeedbackLoop loop_preset(const std::string& name) {
  if (name == "paper-longitudinal") return pitch_loop();
  if (name == "paper-lateral") return roll_rate_loop();
  if (name == "paper-directional") return yaw_rate_loop();
  throw std::invalid_argument("unknown loop preset \"" + name + "\"");
}

const std::vector<ScenarioGroup>& scenario_groups() {
  static const std::vector<ScenarioGroup> groups = build_groups();
  return groups;
}

Scenario find_scenario(const std::string& name) {
  for (const ScenarioGroup& g : scenario_groups()) {
    for (const Scenario& sc : g.members) {
      if (sc.name == name) return sc;
    }
  }
  throw std::invalid_argument("unknown scenario preset \"" + name + "\"");
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const ScenarioGroup& g : scenario_groups()) {
    for (const Scenario& sc : g.members) names.push_back(sc.name);
  }
  return names;
}

const std::vector<std::pair<int, std::string>>& figure_aliases() {
  static const std::vector<std::pair<int, std::string>> aliases = {
      {29, "longitudinal-esweep-short"}, {30, "longitudinal-esweep-long"},
      {31, "longitudinal-isweep-short"}, {32, "longitudinal-isweep-long"},
      {34, "lateral-esweep-short"},      {35, "lateral-esweep-long"},
      {36, "lateral-isweep-short"},      {37, "lateral-isweep-long"},
      {39, "directional-esweep-short"},  {40, "directional-esweep-long"},
      {41, "directional-isweep-short"},  {42, "directional-isweep-long"},
  };
  return aliases;
}

std::string figure_alias(int figure) {
  for (const auto& [num, name] : figure_aliases()) {
    if (num == figure) return name;
  }
  throw std::invalid_argument("no scenario group for figure " +
                              std::to_string(figure));
}

}  // namespace dsat
