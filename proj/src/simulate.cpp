#include "dsat/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace dsat {

void InputSignal::validate() const {
  if (!std::isfinite(amplitude)) {
    throw std::invalid_argument("input amplitude must be finite");
  }
  if (kind == Kind::doublet) {
    if (!(t_start <= t_half && t_half <= t_end)) {
      throw std::invalid_argument(
          "doublet needs t_start <= t_half <= t_end");
    }
  }
}

std::function<double(double)> make_input(const InputSignal& sig, double dt) {
  sig.validate();
  switch (sig.kind) {
    case InputSignal::Kind::zero:
      return [](double) { return 0.0; };
    case InputSignal::Kind::step:
      return [sig](double t) { return t >= sig.t_start ? sig.amplitude : 0.0; };
    case InputSignal::Kind::impulse:
      if (!(dt > 0.0)) {
        throw std::invalid_argument("impulse input needs a positive dt");
      }
      return [sig, dt](double t) {
        return (t >= sig.t_start && t < sig.t_start + dt) ? sig.amplitude
                                                          : 0.0;
      };
    case InputSignal::Kind::doublet:
      return [sig](double t) {
        if (t >= sig.t_start && t < sig.t_half) return sig.amplitude;
        if (t >= sig.t_half && t < sig.t_end) return -sig.amplitude;
        return 0.0;
      };
  }
  throw std::invalid_argument("unknown input kind");
}

namespace {

// Applies the orbit-driven element patches on top of the static closed-loop
// matrices.  The closure's own contributions to the patched columns are
// additive, so patching works as "remove the plant's baked value, put back
// the scaled one" and leaves the feedback terms intact.
class SystemAssembler {
 public:
  SystemAssembler(const Scenario& sc, const ClosedLoopSystem& closed)
      : sc_(sc),
        A0_(closed.A),
        B0_(closed.B),
        R0_(sc.R0 > 0.0 ? sc.R0 : sc.orbit.a) {
    gg_base_[0] = sc.plant.A(kP, kPhiS);
    gg_base_[1] = sc.plant.A(kQ, kThetaS);
    gg_base_[2] = sc.plant.A(kR, kThetaS);
  }

  void eval(double t, Eigen::MatrixXd& A, Eigen::MatrixXd& B,
            OrbitState* state_out = nullptr) const {
    const OrbitState st = propagate(sc_.orbit, t);
    A = A0_;
    B = B0_;
    if (sc_.flags.kinematic_dn) {
      // The kinematic slots carry the instantaneous rate offset; the baked
      // design-point value delta_n0 is replaced by delta_n0 + delta_n(t).
      const double dn = sc_.plant.delta_n0 + st.delta_n;
      A(kPhiS, kPsiS) = dn;
      A(kPsiS, kPhiS) = -dn;
    }
    if (sc_.flags.gg_scaling && sc_.plant.gg_enabled) {
      const double scale = gg_scale(st, R0_);
      A(kP, kPhiS) += gg_base_[0] * (scale - 1.0);
      A(kQ, kThetaS) += gg_base_[1] * (scale - 1.0);
      A(kR, kThetaS) += gg_base_[2] * (scale - 1.0);
    }
    if (sc_.element_modulation) {
      sc_.element_modulation(t, st,
                             A.topLeftCorner(kNumStates, kNumStates));
    }
    if (state_out) *state_out = st;
  }

  double delta_n_at(double t) const {
    return propagate(sc_.orbit, t).delta_n;
  }

 private:
  const Scenario& sc_;
  Eigen::MatrixXd A0_, B0_;
  double R0_;
  double gg_base_[3] = {0.0, 0.0, 0.0};
};

}  // namespace

void system_at(const Scenario& scenario, double t, Eigen::MatrixXd& A,
               Eigen::MatrixXd& B) {
  ClosedLoopSystem closed = close_loops(scenario.plant, scenario.loops);
  SystemAssembler assembler(scenario, closed);
  assembler.eval(t, A, B);
}

Eigen::VectorXd step_rk4(
    const std::function<void(double, Eigen::MatrixXd&, Eigen::MatrixXd&)>&
        system,
    const Eigen::VectorXd& x, double t, double dt,
    const std::function<Eigen::Vector2d(double)>& u) {
  Eigen::MatrixXd A, B;
  system(t, A, B);
  const Eigen::VectorXd k1 = A * x + B * u(t);
  system(t + 0.5 * dt, A, B);
  const Eigen::Vector2d u_half = u(t + 0.5 * dt);
  const Eigen::VectorXd k2 = A * (x + 0.5 * dt * k1) + B * u_half;
  const Eigen::VectorXd k3 = A * (x + 0.5 * dt * k2) + B * u_half;
  system(t + dt, A, B);
  const Eigen::VectorXd k4 = A * (x + dt * k3) + B * u(t + dt);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

SimulationResult simulate(const Scenario& scenario) {
  if (!(scenario.dt > 0.0) || !std::isfinite(scenario.dt)) {
    throw std::invalid_argument("simulation dt must be positive");
  }
  if (!(scenario.duration > 0.0) || !std::isfinite(scenario.duration)) {
    throw std::invalid_argument("simulation duration must be positive");
  }
  scenario.input.validate();
  scenario.orbit.validate();

  SimulationResult result;
  result.scenario = scenario;
  result.closed = close_loops(scenario.plant, scenario.loops);
  const ClosedLoopSystem& closed = result.closed;
  const int N = closed.size();
  const long nsteps =
      std::lround(scenario.duration / scenario.dt);
  if (nsteps < 1) {
    throw std::invalid_argument("duration shorter than one step");
  }

  SystemAssembler assembler(scenario, closed);
  const std::function<double(double)> ref =
      make_input(scenario.input, scenario.dt);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  for (int i = 0; i < kNumStates; ++i) x(i) = scenario.x0[i];

  result.t.reserve(nsteps + 1);
  result.X.resize(nsteps + 1, N);
  result.de_applied.reserve(nsteps + 1);
  result.dn_applied.reserve(nsteps + 1);

  const auto record = [&](double t, const Eigen::VectorXd& xs) {
    result.t.push_back(t);
    result.X.row(result.t.size() - 1) = xs.transpose();
    const double r = ref(t);
    double de;
    if (closed.blocks.empty()) {
      de = r;  // open loop: the reference drives the voltage channel directly
    } else {
      de = 0.0;
      for (const auto& blk : closed.blocks) {
        const int m = static_cast<int>(blk.real.Ac.rows());
        de += blk.real.Dc * (r - xs(blk.sensed));
        if (m > 0) de += blk.real.Cc.dot(xs.segment(blk.offset, m));
      }
    }
    result.de_applied.push_back(de);
    result.dn_applied.push_back(
        scenario.flags.b_channel_dn ? assembler.delta_n_at(t) : 0.0);
  };

  record(0.0, x);

  // The dn channel follows the same flag as its input column; the other
  // couplings live inside the assembler.
  const auto u = [&](double t) {
    return Eigen::Vector2d(
        ref(t), scenario.flags.b_channel_dn ? assembler.delta_n_at(t) : 0.0);
  };
  const auto system = [&](double t, Eigen::MatrixXd& A, Eigen::MatrixXd& B) {
    assembler.eval(t, A, B);
  };

  for (long i = 0; i < nsteps; ++i) {
    const double t = i * scenario.dt;
    x = step_rk4(system, x, t, scenario.dt, u);
    if (!x.allFinite()) {
      result.diverged = true;
      result.t_diverged = t + scenario.dt;
      result.X.conservativeResize(result.t.size(), N);
      return result;
    }
    record((i + 1) * scenario.dt, x);
  }
  return result;
}

namespace {

InputSignal::Kind input_kind_from_string(const std::string& s) {
  if (s == "zero") return InputSignal::Kind::zero;
  if (s == "step") return InputSignal::Kind::step;
  if (s == "impulse") return InputSignal::Kind::impulse;
  if (s == "doublet") return InputSignal::Kind::doublet;
  throw std::invalid_argument("unknown input kind \"" + s + "\"");
}

std::string input_kind_to_string(InputSignal::Kind k) {
  switch (k) {
    case InputSignal::Kind::zero:
      return "zero";
    case InputSignal::Kind::step:
      return "step";
    case InputSignal::Kind::impulse:
      return "impulse";
    case InputSignal::Kind::doublet:
      return "doublet";
  }
  throw std::invalid_argument("unknown input kind");
}

constexpr double kDegPerRad = 180.0 / 3.14159265358979323846;

}  // namespace

Scenario scenario_from_json(const nlohmann::json& config) {
  Scenario sc;
  sc.name = config.value("name", "scenario");
  sc.plant = load_plant_literal(config.at("plant"),
                                config.value("accept_literal_row6", false));
  if (config.contains("loops")) {
    for (const auto& lj : config.at("loops")) {
      sc.loops.push_back(loop_from_json(lj));
    }
  }
  sc.orbit = orbit_from_json(config.at("orbit"));
  if (config.contains("input")) {
    const auto& ij = config.at("input");
    sc.input.kind = input_kind_from_string(ij.value("kind", "zero"));
    sc.input.amplitude = ij.value("amplitude", 0.0);
    sc.input.t_start = ij.value("t_start", 0.0);
    sc.input.t_half = ij.value("t_half", 0.0);
    sc.input.t_end = ij.value("t_end", 0.0);
  }
  if (config.contains("flags")) {
    const auto& fj = config.at("flags");
    sc.flags.kinematic_dn = fj.value("kinematic_dn", true);
    sc.flags.b_channel_dn = fj.value("b_channel_dn", true);
    sc.flags.gg_scaling = fj.value("gg_scaling", true);
  }
  sc.duration = config.at("duration").get<double>();
  sc.dt = config.value("dt", 0.01);
  sc.R0 = config.value("R0", 0.0);
  if (config.contains("x0")) {
    const auto& xj = config.at("x0");
    sc.x0[kP] = xj.value("p", 0.0);
    sc.x0[kQ] = xj.value("q", 0.0);
    sc.x0[kR] = xj.value("r", 0.0);
    sc.x0[kPhiS] = xj.value("phi_s_deg", 0.0) / kDegPerRad;
    sc.x0[kThetaS] = xj.value("theta_s_deg", 0.0) / kDegPerRad;
    sc.x0[kPsiS] = xj.value("psi_s_deg", 0.0) / kDegPerRad;
  }
  return sc;
}

nlohmann::json scenario_to_json(const Scenario& sc) {
  nlohmann::json loops = nlohmann::json::array();
  for (const auto& l : sc.loops) loops.push_back(loop_to_json(l));
  return {
      {"name", sc.name},
      {"plant", plant_to_json(sc.plant)},
      {"loops", loops},
      {"orbit", orbit_to_json(sc.orbit)},
      {"input",
       {{"kind", input_kind_to_string(sc.input.kind)},
        {"amplitude", sc.input.amplitude},
        {"t_start", sc.input.t_start},
        {"t_half", sc.input.t_half},
        {"t_end", sc.input.t_end}}},
      {"flags",
       {{"kinematic_dn", sc.flags.kinematic_dn},
        {"b_channel_dn", sc.flags.b_channel_dn},
        {"gg_scaling", sc.flags.gg_scaling}}},
      {"duration", sc.duration},
      {"dt", sc.dt},
      {"R0", sc.R0},
      {"x0",
       {{"p", sc.x0[kP]},
        {"q", sc.x0[kQ]},
        {"r", sc.x0[kR]},
        {"phi_s_deg", sc.x0[kPhiS] * kDegPerRad},
        {"theta_s_deg", sc.x0[kThetaS] * kDegPerRad},
        {"psi_s_deg", sc.x0[kPsiS] * kDegPerRad}}}};
}

}  // namespace dsat
