#include "se3ekf/controller.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "se3ekf/errors.hpp"

namespace se3ekf {

void Gains::validate() const {
  const double all[] = {kx, kv, ki, sigma, kR, kW, kI, c1, c2, psi1};
  for (double v : all) {
    if (!(v > 0.0)) throw std::invalid_argument("Gains: every gain must be strictly positive");
  }
  if (!(psi1 < 1.0)) throw std::invalid_argument("Gains: psi1 must be below 1");
}

TrackingErrors tracking_errors(const Vec3& x, const Vec3& v, const TrajectorySample& cmd) {
  return {x - cmd.x, v - cmd.v};
}

Vec3 compute_A(const Vec3& ex, const Vec3& ev, const Vec3& ei, const Vec3& a_d, const Gains& g,
               const QuadrotorParams& p) {
  return -g.kx * ex - g.kv * ev - g.ki * sat(g.sigma, ei) - p.mass * p.gravity * kE3 +
         p.mass * a_d;
}

ComputedAttitude compute_Rc(const Vec3& A, const Vec3& b1d, const ControllerOptions& opt) {
  const double nA = A.norm();
  if (!(nA >= opt.eps_thrust)) {
    std::ostringstream os;
    os << "compute_Rc: ‖A‖ = " << nA << " below " << opt.eps_thrust;
    throw DegenerateThrust(os.str());
  }
  ComputedAttitude c;
  c.A = A;
  c.b3c = -A / nA;
  const Vec3 u = c.b3c.cross(b1d);
  const double nu = u.norm();
  if (!(nu >= opt.eps_cross)) {
    std::ostringstream os;
    os << "compute_Rc: ‖b3c × b1d‖ = " << nu << " below " << opt.eps_cross;
    throw HeadingSingularity(os.str());
  }
  c.b2c = u / nu;
  c.b1c = c.b2c.cross(c.b3c);
  Mat3 Rc;
  Rc << c.b1c, c.b2c, c.b3c;
  c.Rc = Rotation::unchecked(Rc);
  return c;
}

ThrustKinematics thrust_kinematics(const FullState& s, const TrajectorySample& ref, const Gains& g,
                                   const QuadrotorParams& p, const ControllerOptions& opt) {
  ThrustKinematics k;
  k.ref = ref;
  k.err = tracking_errors(s.x, s.v, ref);
  k.sat_ei = sat(g.sigma, s.ei);
  for (int i = 0; i < 3; ++i) k.unsaturated(i) = std::abs(s.ei(i)) < g.sigma ? 1.0 : 0.0;

  k.A = compute_A(k.err.ex, k.err.ev, s.ei, ref.a, g, p);
  k.f = thrust(k.A, s.R.matrix());
  k.v_dot = translational_acceleration(s.R.matrix(), k.f, p);
  k.ei_dot = k.err.ev + g.c1 * k.err.ex;
  const Vec3 ev_dot = k.v_dot - ref.a;
  k.A_dot = -g.kx * k.err.ev - g.kv * ev_dot - g.ki * k.unsaturated.cwiseProduct(k.ei_dot) +
            p.mass * ref.j;

  k.cmd = compute_Rc(k.A, ref.b1, opt);
  k.norm_A = k.A.norm();
  const Vec3& b1 = k.cmd.b1c;
  const Vec3& b2 = k.cmd.b2c;
  const Vec3& b3 = k.cmd.b3c;
  k.cross_norm = b3.cross(ref.b1).norm();
  k.beta = ref.b1.dot(b3);

  k.a1.row(0) = b1.transpose();
  k.a1.row(1) = b2.transpose();
  k.a1.row(2) = (k.beta / (k.cross_norm * k.cross_norm)) * ref.b1.transpose();

  const Vec3 zeta3 = -b3.cross(k.A_dot) / k.norm_A;
  const Vec3 a2(0.0, 0.0, ref.b1_dot.dot(b2) / k.cross_norm);
  k.cmd.Wc = k.a1 * zeta3 + a2;
  return k;
}

Vec3 compute_Omega_c(const FullState& s, const TrajectorySample& ref, const Gains& g,
                     const QuadrotorParams& p, const ControllerOptions& opt) {
  return thrust_kinematics(s, ref, g, p, opt).cmd.Wc;
}

FullState flow_shift(const FullState& s, const ThrustKinematics& k, double h) {
  FullState out = s;
  out.x = s.x + h * s.v;
  out.v = s.v + h * k.v_dot;
  out.R = s.R * exp_so3(h * s.W);
  out.ei = s.ei + h * k.ei_dot;
  return out;
}

namespace {

Vec3 omega_c_dot_from(const FullState& s, const ThrustKinematics& k, const Trajectory& traj,
                      double t, const Gains& g, const QuadrotorParams& p,
                      const ControllerOptions& opt) {
  const double h = opt.omega_dot_step;
  const Vec3 Wp = compute_Omega_c(flow_shift(s, k, h), traj.sample(t + h), g, p, opt);
  const Vec3 Wm = compute_Omega_c(flow_shift(s, k, -h), traj.sample(t - h), g, p, opt);
  return (Wp - Wm) / (2.0 * h);
}

}  // namespace

Vec3 compute_Omega_c_dot(const FullState& s, const Trajectory& traj, double t, const Gains& g,
                         const QuadrotorParams& p, const ControllerOptions& opt) {
  if (!(opt.omega_dot_step > 0.0)) {
    throw std::invalid_argument("compute_Omega_c_dot: step must be positive");
  }
  const ThrustKinematics k = thrust_kinematics(s, traj.sample(t), g, p, opt);
  return omega_c_dot_from(s, k, traj, t, g, p, opt);
}

Vec3 attitude_moment(const Mat3& R, const Vec3& W, const Mat3& Rc, const Vec3& Wc,
                     const Vec3& Wc_dot, const Vec3& eI, const Gains& g, const Mat3& J) {
  const AttitudeError att = attitude_error(R, Rc);
  const Vec3 eW = angular_velocity_error(R, W, Rc, Wc);
  const Mat3 RtRc = R.transpose() * Rc;
  const Vec3 w = RtRc * Wc;
  return -g.kR * att.e_R - g.kW * eW - g.kI * eI + w.cross(J * w) + J * (RtRc * Wc_dot);
}

double thrust(const Vec3& A, const Mat3& R) { return -A.dot(R * kE3); }

IntegralRates integral_rates(const Vec3& ex, const Vec3& ev, const Vec3& eR, const Vec3& eW,
                             const Gains& g) {
  return {ev + g.c1 * ex, eW + g.c2 * eR};
}

ModeGate mode_gate(const Mat3& R, const Mat3& Rc, double psi1) {
  return attitude_error(R, Rc).psi < psi1 ? ModeGate::PositionModeOk
                                          : ModeGate::AttitudeErrorLarge;
}

ControlSolution solve_control(const FullState& s, const Trajectory& traj, double t, const Gains& g,
                              const QuadrotorParams& p, const ControllerOptions& opt) {
  ControlSolution out;
  out.kin = thrust_kinematics(s, traj.sample(t), g, p, opt);
  out.Wc_dot = omega_c_dot_from(s, out.kin, traj, t, g, p, opt);
  out.kin.cmd.Wc_dot = out.Wc_dot;
  const Mat3& R = s.R.matrix();
  const Mat3& Rc = out.kin.cmd.Rc.matrix();
  out.att = attitude_error(R, Rc);
  out.eW = angular_velocity_error(R, s.W, Rc, out.kin.cmd.Wc);
  out.u.thrust = out.kin.f;
  out.u.moment =
      attitude_moment(R, s.W, Rc, out.kin.cmd.Wc, out.Wc_dot, s.eI, g, p.inertia);
  out.rates = integral_rates(out.kin.err.ex, out.kin.err.ev, out.att.e_R, out.eW, g);
  return out;
}

}  // namespace se3ekf
