#include "se3ekf/dynamics.hpp"

#include "se3ekf/errors.hpp"

#include <stdexcept>

namespace se3ekf {

const Vec3& FullState::block(Block b) const {
  switch (b) {
    case Block::Position: return x;
    case Block::Velocity: return v;
    case Block::AngularVelocity: return W;
    case Block::PositionIntegral: return ei;
    case Block::AttitudeIntegral: return eI;
    case Block::Attitude: break;
  }
  throw std::invalid_argument("FullState::block: attitude is not a vector block");
}

Vec3& FullState::block(Block b) {
  return const_cast<Vec3&>(static_cast<const FullState&>(*this).block(b));
}

FullState retract(const FullState& s, const Vec18& d) {
  FullState out = s;
  out.x += d.segment<3>(offset(Block::Position));
  out.v += d.segment<3>(offset(Block::Velocity));
  out.R = s.R * exp_so3(d.segment<3>(offset(Block::Attitude)));
  out.W += d.segment<3>(offset(Block::AngularVelocity));
  out.ei += d.segment<3>(offset(Block::PositionIntegral));
  out.eI += d.segment<3>(offset(Block::AttitudeIntegral));
  return out;
}

Vec18 difference(const FullState& a, const FullState& b) {
  Vec18 d;
  d.segment<3>(offset(Block::Position)) = a.x - b.x;
  d.segment<3>(offset(Block::Velocity)) = a.v - b.v;
  d.segment<3>(offset(Block::Attitude)) = log_so3(b.R.inverse() * a.R);
  d.segment<3>(offset(Block::AngularVelocity)) = a.W - b.W;
  d.segment<3>(offset(Block::PositionIntegral)) = a.ei - b.ei;
  d.segment<3>(offset(Block::AttitudeIntegral)) = a.eI - b.eI;
  return d;
}

void QuadrotorParams::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("QuadrotorParams: mass must be positive");
  if (!(gravity > 0.0)) throw std::invalid_argument("QuadrotorParams: gravity must be positive");
  if (!inertia.allFinite() || (inertia - inertia.transpose()).norm() > 1e-12 * inertia.norm()) {
    throw std::invalid_argument("QuadrotorParams: inertia must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw std::invalid_argument("QuadrotorParams: inertia must be positive definite");
  }
}

Vec3 translational_acceleration(const Mat3& R, double thrust, const QuadrotorParams& p) {
  return p.gravity * kE3 - (thrust / p.mass) * (R * kE3) + p.force_disturbance / p.mass;
}

PlantTangent state_derivative(const QuadrotorState& s, const ControlInput& u,
                              const QuadrotorParams& p) {
  const Mat3& R = s.R.matrix();
  PlantTangent d;
  d.x_dot = s.v;
  d.v_dot = translational_acceleration(R, u.thrust, p);
  d.R_dot = R * hat(s.W);
  d.W_dot = p.inertia.ldlt().solve(u.moment + p.moment_disturbance -
                                   s.W.cross(p.inertia * s.W));
  return d;
}

namespace {

FullState advance(const FullState& s, const FullTangent& k, double h) {
  FullState out;
  out.x = s.x + h * k.x_dot;
  out.v = s.v + h * k.v_dot;
  out.R = Rotation::unchecked(s.R.matrix() + h * k.R_dot);
  out.W = s.W + h * k.W_dot;
  out.ei = s.ei + h * k.ei_dot;
  out.eI = s.eI + h * k.eI_dot;
  return out;
}

FullTangent combine(const FullTangent& k1, const FullTangent& k2, const FullTangent& k3,
                    const FullTangent& k4) {
  FullTangent k;
  k.x_dot = (k1.x_dot + 2.0 * k2.x_dot + 2.0 * k3.x_dot + k4.x_dot) / 6.0;
  k.v_dot = (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot) / 6.0;
  k.R_dot = (k1.R_dot + 2.0 * k2.R_dot + 2.0 * k3.R_dot + k4.R_dot) / 6.0;
  k.W_dot = (k1.W_dot + 2.0 * k2.W_dot + 2.0 * k3.W_dot + k4.W_dot) / 6.0;
  k.ei_dot = (k1.ei_dot + 2.0 * k2.ei_dot + 2.0 * k3.ei_dot + k4.ei_dot) / 6.0;
  k.eI_dot = (k1.eI_dot + 2.0 * k2.eI_dot + 2.0 * k3.eI_dot + k4.eI_dot) / 6.0;
  return k;
}

}  // namespace

FullState rk4_step(const FullState& s, const FullField& field, double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
  const FullTangent k1 = field(s, t);
  const FullTangent k2 = field(advance(s, k1, 0.5 * dt), t + 0.5 * dt);
  const FullTangent k3 = field(advance(s, k2, 0.5 * dt), t + 0.5 * dt);
  const FullTangent k4 = field(advance(s, k3, dt), t + dt);
  FullState out = advance(s, combine(k1, k2, k3, k4), dt);
  if (!out.R.matrix().allFinite() || !out.x.allFinite() || !out.v.allFinite() ||
      !out.W.allFinite() || !out.ei.allFinite() || !out.eI.allFinite()) {
    throw NumericalFailure("rk4_step: state became non-finite");
  }
  try {
    out.R = Rotation::project(out.R.matrix());
  } catch (const std::invalid_argument&) {
    throw NumericalFailure("rk4_step: attitude left SO(3) beyond repair (step too large for the angular rate)");
  }
  return out;
}

QuadrotorState rk4_step(const QuadrotorState& s, const ControlInput& u, const QuadrotorParams& p,
                        double dt) {
  const FullField field = [&](const FullState& st, double) {
    const PlantTangent d = state_derivative(st.plant(), u, p);
    FullTangent k;
    k.x_dot = d.x_dot;
    k.v_dot = d.v_dot;
    k.R_dot = d.R_dot;
    k.W_dot = d.W_dot;
    return k;
  };
  return rk4_step(FullState(s, ControllerState{}), field, 0.0, dt).plant();
}

}  // namespace se3ekf
