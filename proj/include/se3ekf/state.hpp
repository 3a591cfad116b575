#pragma once

#include "se3ekf/geom.hpp"
#include "se3ekf/types.hpp"

namespace se3ekf {

/// Rigid-body state: inertial position and velocity, attitude, body angular rate.
struct QuadrotorState {
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Rotation R;
  Vec3 W = Vec3::Zero();
};

/// Integrators of the position (e_i) and attitude (e_I) tracking errors.
struct ControllerState {
  Vec3 ei = Vec3::Zero();
  Vec3 eI = Vec3::Zero();
};

/// Plant plus controller integrators: (x, v, R, Ω, e_i, e_I).
struct FullState {
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Rotation R;
  Vec3 W = Vec3::Zero();
  Vec3 ei = Vec3::Zero();
  Vec3 eI = Vec3::Zero();

  FullState() = default;
  FullState(const QuadrotorState& p, const ControllerState& c)
      : x(p.x), v(p.v), R(p.R), W(p.W), ei(c.ei), eI(c.eI) {}

  QuadrotorState plant() const { return {x, v, R, W}; }
  ControllerState integrals() const { return {ei, eI}; }

  const Vec3& block(Block b) const;
  Vec3& block(Block b);  // not valid for Block::Attitude
};

/// Time derivative of a FullState; Ṙ is kept as a raw 3×3 matrix.
struct FullTangent {
  Vec3 x_dot = Vec3::Zero();
  Vec3 v_dot = Vec3::Zero();
  Mat3 R_dot = Mat3::Zero();
  Vec3 W_dot = Vec3::Zero();
  Vec3 ei_dot = Vec3::Zero();
  Vec3 eI_dot = Vec3::Zero();
};

/// s ⊕ δ: additive on vector blocks, R·exp(η) on the attitude block.
FullState retract(const FullState& s, const Vec18& delta);

/// a ⊖ b in reduced coordinates; attitude component is log(R_bᵀR_a).
Vec18 difference(const FullState& a, const FullState& b);

}  // namespace se3ekf
