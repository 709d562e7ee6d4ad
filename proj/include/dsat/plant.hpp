#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <json.hpp>

namespace dsat {

// State ordering used throughout: body rates first, then stability-axis
// attitude angles.  Angles are radians internally; degrees only at the I/O
// boundary.
enum StateIndex : int {
  kP = 0,       // roll rate about stability x
  kQ = 1,       // pitch rate
  kR = 2,       // yaw rate
  kPhiS = 3,    // roll angle
  kThetaS = 4,  // pitch angle
  kPsiS = 5,    // yaw angle
};

constexpr int kNumStates = 6;
constexpr int kNumInputs = 2;  // [de (V), dn (rad/s)]

// Principal-ish inertia set for the two-body (platform + rotor) vehicle.
// I_YZ is the single retained product of inertia; I_T the transverse rotor
// inertia seen by the platform; I_S the rotor spin inertia; Omega_R0 the
// nominal rotor rate.
struct InertiaParameters {
  double I_X = 0.0;
  double I_Y = 0.0;
  double I_Z = 0.0;
  double I_YZ = 0.0;
  double I_T = 0.0;
  double I_S = 0.0;
  double Omega_R0 = 0.0;

  void validate() const;  // throws std::invalid_argument on bad values
};

// DC motor constants for the despin drive: torque constant path N*K_V/R_dc
// plus viscous friction c, and the voltage-to-torque gain N/R_dc.
struct MotorParameters {
  double N = 0.0;     // gear/torque ratio
  double K_V = 0.0;   // back-EMF constant
  double R_dc = 0.0;  // armature resistance
  double c = 0.0;     // viscous friction coefficient

  void validate() const;
};

// Gravity-gradient stiffness coefficients per axis at the reference radius.
struct GravityGradientCoefficients {
  double G_X = 0.0;
  double G_Y = 0.0;
  double G_Z = 0.0;
};

// Linearised plant x' = A x + B u with x per StateIndex and
// u = [de, dn].  delta_n0 is the constant orbit-rate offset baked into the
// kinematic rows at build time (zero for the literal design-point models).
struct PlantMatrices {
  Eigen::MatrixXd A;  // 6x6
  Eigen::MatrixXd B;  // 6x2
  bool gg_enabled = false;
  double delta_n0 = 0.0;
};

// Inertia denominator common to all moment-equation elements.
// delta_I = I_Y*I_Z + I_Y*I_T - I_YZ^2; must be positive for a physical
// inertia set.
double compute_delta_I(double I_Y, double I_Z, double I_T, double I_YZ);

// Assembles the 6x6/6x2 linear model from physical parameters.  When
// with_gravity_gradient is false the three gravity stiffness elements are
// left at zero (short-horizon model); delta_n0 enters only the kinematic
// rows.
PlantMatrices build_plant(const InertiaParameters& inertia,
                          const MotorParameters& motor,
                          const GravityGradientCoefficients& gg,
                          bool with_gravity_gradient, double delta_n0 = 0.0);

// Checks a plant against the structural stencil of the linear model:
// fixed zero pattern in A and B, kinematic unit entries that must be 0 or 1,
// and the antisymmetric delta_n pair A(3,5) = -A(5,3).  Returns one message
// per violation; empty means the plant is structurally sound.  The 0-or-1
// tolerance on unit slots lets a degenerate all-zero plant pass.
std::vector<std::string> validate_structure(const PlantMatrices& plant);

// Loads a plant from config JSON.  Two layouts:
//   {"literal": {"A": [[...]x6], "B": [[...]x6]}}
//   {"physical": {"inertia": {...}, "motor": {...}, "gravity_gradient":
//                 {...}, "with_gravity_gradient": bool, "delta_n0": num}}
// Literal matrices are returned bit-for-bit but must pass the structural
// check.  One historical layout puts the roll-angle kinematic unit in
// row 4's delta_n slot (row 4 reading [0,0,0,1,0,0] zero-indexed at row 5);
// accept_literal_row6 admits exactly that deviation so the published matrix
// can be reproduced verbatim.
PlantMatrices load_plant_literal(const nlohmann::json& config,
                                 bool accept_literal_row6 = false);

// Serialises back to the {"literal": ...} layout.
nlohmann::json plant_to_json(const PlantMatrices& plant);

}  // namespace dsat
