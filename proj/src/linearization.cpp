#include "se3ekf/linearization.hpp"

#include <stdexcept>

namespace se3ekf {

FullTangent closed_loop_field(const FullState& s, const Trajectory& traj, double t,
                              const Gains& g, const QuadrotorParams& p,
                              const ControllerOptions& opt) {
  const ControlSolution c = solve_control(s, traj, t, g, p, opt);
  const PlantTangent d = state_derivative(s.plant(), c.u, p);
  FullTangent k;
  k.x_dot = d.x_dot;
  k.v_dot = d.v_dot;
  k.R_dot = d.R_dot;
  k.W_dot = d.W_dot;
  k.ei_dot = c.rates.ei_dot;
  k.eI_dot = c.rates.eI_dot;
  return k;
}

namespace {

// Blocks of the translational row and of the computed-attitude variation
//   ηc  = Yx δx + Yv δv + Yi δe_i
//   δΩc = Cx δx + Cv δv + B7 η + Ci δe_i
// at one state. All of them are free of Ω and e_I, so their time derivatives
// along the flow can be taken with flow_shift.
struct RateBlocks {
  ThrustKinematics kin;
  Mat3 Ki;  // k_i times the unsaturated mask
  Mat3 m21, m22, m23, m24;
  Mat3 W;   // a1 b̂3 / ‖A‖, so that ηc = −W δA
  Mat3 B7;
  Mat3 Cx, Cv, Ci;
};

RateBlocks rate_blocks(const FullState& s, const TrajectorySample& ref, const Gains& g,
                       const QuadrotorParams& p, const ControllerOptions& opt) {
  RateBlocks r;
  r.kin = thrust_kinematics(s, ref, g, p, opt);
  const ThrustKinematics& k = r.kin;
  const Mat3& R = s.R.matrix();
  const Mat3 I = Mat3::Identity();
  const double m = p.mass;
  const double nA = k.norm_A;
  const Vec3 Re3 = R * kE3;
  const Vec3& A = k.A;
  const Vec3& A_dot = k.A_dot;
  const Vec3& b3 = k.cmd.b3c;
  const Mat3 b3_hat = hat(b3);

  r.Ki = g.ki * k.unsaturated.asDiagonal();

  // δv̇ = m21 δx + m22 δv + m23 η + m24 δe_i
  const Mat3 P = Re3 * Re3.transpose() / m;
  r.m21 = -g.kx * P;
  r.m22 = -g.kv * P;
  r.m24 = -P * r.Ki;
  r.m23 = -(Re3 * A.transpose() * R * hat(kE3) + A.dot(Re3) * R * hat(kE3)) / m;

  // ż3 = X1 δA + X2 δȦ with z3 = −b3 × δA/‖A‖
  const double AAd = A.dot(A_dot);
  const Vec3 b3_dot = -A_dot / nA + A * AAd / (nA * nA * nA);
  const Mat3 X1 = -hat(b3_dot) / nA + b3_hat * AAd / (nA * nA * nA);
  const Mat3 X2 = -b3_hat / nA;

  const Mat3 B1 = -g.kx * X1 - g.kv * X2 * r.m21 - g.c1 * X2 * r.Ki;
  const Mat3 B2 = -g.kv * X1 - X2 * (g.kx * I + r.Ki) - g.kv * X2 * r.m22;
  const Mat3 B3 = -g.kv * X2 * r.m23;
  const Mat3 B4 = -X1 * r.Ki - g.kv * X2 * r.m24;

  // ȧ1 along the flow, from Ṙc = Rc Ω̂c and the heading rate.
  const Mat3& Rc = k.cmd.Rc.matrix();
  const Mat3 Rc_dot = Rc * hat(k.cmd.Wc);
  const Vec3& b1d = k.ref.b1;
  const Vec3& b1d_dot = k.ref.b1_dot;
  const double beta = k.beta;
  const double u2 = k.cross_norm * k.cross_norm;
  const double beta_dot = b1d_dot.dot(b3) + b1d.dot(Rc_dot.col(2));
  const double gamma = beta / u2;
  const double gamma_dot = beta_dot * (1.0 + beta * beta) / (u2 * u2);
  Mat3 a1_dot;
  a1_dot.row(0) = Rc_dot.col(0).transpose();
  a1_dot.row(1) = Rc_dot.col(1).transpose();
  a1_dot.row(2) = gamma_dot * b1d.transpose() + gamma * b1d_dot.transpose();

  r.W = k.a1 * b3_hat / nA;
  const Mat3 W_dot_part = a1_dot * b3_hat / nA;

  const Mat3 B5 = g.kx * W_dot_part + k.a1 * B1;
  const Mat3 B6 = g.kv * W_dot_part + k.a1 * B2;
  r.B7 = k.a1 * B3;
  const Mat3 B8 = W_dot_part * r.Ki + k.a1 * B4;
  const Mat3 B9 = hat(k.cmd.Wc) * r.W;

  r.Cx = B5 + g.kx * B9;
  r.Cv = B6 + g.kv * B9;
  r.Ci = B8 + B9 * r.Ki;
  return r;
}

}  // namespace

LinearizedSystem assemble_A_L(const FullState& s, const Trajectory& traj, double t,
                              const Gains& g, const QuadrotorParams& p,
                              const LinearizationOptions& opt) {
  if (!(opt.rate_step > 0.0)) throw std::invalid_argument("assemble_A_L: rate_step must be positive");
  const ControllerOptions& copt = opt.controller;
  const RateBlocks r = rate_blocks(s, traj.sample(t), g, p, copt);
  const ThrustKinematics& k = r.kin;

  // Time derivatives of Cx, Cv, B7, Ci along the closed-loop flow.
  const double h = opt.rate_step;
  const RateBlocks rp = rate_blocks(flow_shift(s, k, h), traj.sample(t + h), g, p, copt);
  const RateBlocks rm = rate_blocks(flow_shift(s, k, -h), traj.sample(t - h), g, p, copt);
  const Mat3 Cx_dot = (rp.Cx - rm.Cx) / (2.0 * h);
  const Mat3 Cv_dot = (rp.Cv - rm.Cv) / (2.0 * h);
  const Mat3 Ci_dot = (rp.Ci - rm.Ci) / (2.0 * h);
  const Mat3 B7_dot = (rp.B7 - rm.B7) / (2.0 * h);

  const Mat3 I = Mat3::Identity();
  const Mat3 W_hat = hat(s.W);

  // δΩ̇c = F1 δx + F2 δv + F3 η + B7 δΩ + F4 δe_i
  const Mat3 F1 = Cx_dot + r.Cv * r.m21 + g.c1 * r.Ci;
  const Mat3 F2 = r.Cx + Cv_dot + r.Cv * r.m22 + r.Ci;
  const Mat3 F3 = r.Cv * r.m23 + B7_dot - r.B7 * W_hat;
  const Mat3 F4 = Ci_dot + r.Cv * r.m24;

  const Vec3 Wc_dot_ctrl = compute_Omega_c_dot(s, traj, t, g, p, copt);

  const Mat3& R = s.R.matrix();
  const Mat3& Rc = k.cmd.Rc.matrix();
  const Vec3& Wc = k.cmd.Wc;
  const Mat3& J = p.inertia;
  const Mat3 Jinv = J.inverse();

  const Mat3 G3 = R.transpose() * Rc;
  const Vec3 w = G3 * Wc;
  const Mat3 G1 = hat(w);
  const Mat3 G2 = G3 * hat(Wc);
  const Mat3 G4 = 0.5 * (G3.trace() * I - G3);
  const Mat3 G5 = G4.transpose();

  // δ(ŵJw) = Pw δw
  const Mat3 Pw = G1 * J - hat(J * w);
  const Mat3 B10 = Jinv * (-g.kR * G4 + g.kW * G1 + Pw * G1 + J * hat(G3 * Wc_dot_ctrl));
  const Mat3 B11 = Jinv * (g.kR * G5 - g.kW * G2 - Pw * G2 - J * G3 * hat(Wc_dot_ctrl));
  const Mat3 B12 = Jinv * (-g.kW * I + hat(J * s.W) - W_hat * J);
  const Mat3 B13 = Jinv * (g.kW * G3 + Pw * G3);
  const Mat3& B14 = G3;

  const Mat3 Yx = g.kx * r.W;
  const Mat3 Yv = g.kv * r.W;
  const Mat3 Yi = r.W * r.Ki;

  LinearizedSystem L;
  L.set_block(1, 2, I);

  L.set_block(2, 1, r.m21);
  L.set_block(2, 2, r.m22);
  L.set_block(2, 3, r.m23);
  L.set_block(2, 5, r.m24);

  L.set_block(3, 3, -W_hat);
  L.set_block(3, 4, I);

  L.set_block(4, 1, B11 * Yx + B13 * r.Cx + B14 * F1);
  L.set_block(4, 2, B11 * Yv + B13 * r.Cv + B14 * F2);
  L.set_block(4, 3, B10 + B13 * r.B7 + B14 * F3);
  L.set_block(4, 4, B12 + B14 * r.B7);
  L.set_block(4, 5, B11 * Yi + B13 * r.Ci + B14 * F4);
  L.set_block(4, 6, -g.kI * Jinv);

  L.set_block(5, 1, g.c1 * I);
  L.set_block(5, 2, I);

  const Mat3 Geta = G2 - g.c2 * G5;  // coefficient of ηc in δė_I
  L.set_block(6, 1, Geta * Yx - G3 * r.Cx);
  L.set_block(6, 2, Geta * Yv - G3 * r.Cv);
  L.set_block(6, 3, -G1 + g.c2 * G4 - G3 * r.B7);
  L.set_block(6, 4, I);
  L.set_block(6, 5, Geta * Yi - G3 * r.Ci);
  return L;
}

Mat18 fd_jacobian(const FullField& field, const FullState& s, double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_jacobian: step must be positive");
  const Mat3& R0 = s.R.matrix();
  const Mat3 W0_hat = hat(s.W);
  auto reduced = [&](const FullState& sp, const FullTangent& k) {
    Vec18 out;
    out.segment<3>(offset(Block::Position)) = k.x_dot;
    out.segment<3>(offset(Block::Velocity)) = k.v_dot;
    out.segment<3>(offset(Block::Attitude)) =
        vee_skew(R0.transpose() * k.R_dot - W0_hat * R0.transpose() * sp.R.matrix());
    out.segment<3>(offset(Block::AngularVelocity)) = k.W_dot;
    out.segment<3>(offset(Block::PositionIntegral)) = k.ei_dot;
    out.segment<3>(offset(Block::AttitudeIntegral)) = k.eI_dot;
    return out;
  };
  Mat18 J;
  for (int j = 0; j < kReducedDim; ++j) {
    const Vec18 d = h * Vec18::Unit(j);
    const FullState sp = retract(s, d);
    const FullState sm = retract(s, -d);
    J.col(j) = (reduced(sp, field(sp, t)) - reduced(sm, field(sm, t))) / (2.0 * h);
  }
  return J;
}

MatX fd_jacobian(const std::function<VecX(const VecX&)>& field, const VecX& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_jacobian: step must be positive");
  const VecX f0 = field(x);
  MatX J(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    VecX xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    J.col(j) = (field(xp) - field(xm)) / (2.0 * h);
  }
  return J;
}

}  // namespace se3ekf
