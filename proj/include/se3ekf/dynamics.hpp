#pragma once

#include <functional>

#include "se3ekf/state.hpp"
#include "se3ekf/types.hpp"

namespace se3ekf {

struct QuadrotorParams {
  double mass = 0.755;                                           // kg
  Mat3 inertia = Vec3(0.557e-2, 0.557e-2, 1.05e-2).asDiagonal();  // kg·m²
  double gravity = 9.81;                                         // m/s²
  Vec3 force_disturbance = Vec3::Zero();                         // Δ_x, N
  Vec3 moment_disturbance = Vec3::Zero();                        // Δ_R, N·m
  double arm_length = 0.0;  // m; not used by the thrust/moment-level model

  /// Throws std::invalid_argument unless m > 0, g > 0 and J is SPD.
  void validate() const;
};

struct ControlInput {
  double thrust = 0.0;        // f, N
  Vec3 moment = Vec3::Zero();  // M, N·m, body frame
};

struct PlantTangent {
  Vec3 x_dot;
  Vec3 v_dot;
  Mat3 R_dot;
  Vec3 W_dot;
};

/// Rigid-body equations of motion:
///   ẋ = v,  m v̇ = m g e₃ − f R e₃ + Δ_x,  Ṙ = R Ω̂,  J Ω̇ = M + Δ_R − Ω × JΩ.
PlantTangent state_derivative(const QuadrotorState& s, const ControlInput& u,
                              const QuadrotorParams& p);

/// Translational acceleration alone (the second line above).
Vec3 translational_acceleration(const Mat3& R, double thrust, const QuadrotorParams& p);

using FullField = std::function<FullTangent(const FullState&, double)>;

/// Classical RK4 on (x, v, R, Ω, e_i, e_I) with R treated as a 3×3 matrix
/// during the stages and projected back onto SO(3) after the step.
FullState rk4_step(const FullState& s, const FullField& field, double t, double dt);

/// Plant-only RK4 with the input held over the step.
QuadrotorState rk4_step(const QuadrotorState& s, const ControlInput& u,
                        const QuadrotorParams& p, double dt);

}  // namespace se3ekf
