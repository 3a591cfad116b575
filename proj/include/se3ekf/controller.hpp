#pragma once

#include "se3ekf/dynamics.hpp"
#include "se3ekf/geom.hpp"
#include "se3ekf/state.hpp"
#include "se3ekf/trajectory.hpp"

namespace se3ekf {

struct Gains {
  double kx = 13.84;
  double kv = 4.84;
  double ki = 0.01;    // position integral gain
  double sigma = 1.0;  // saturation bound on e_i
  double kR = 0.67;
  double kW = 0.11;
  double kI = 0.01;    // attitude integral gain
  double c1 = 0.1;
  double c2 = 0.1;
  double psi1 = 0.9;

  /// Throws std::invalid_argument unless every gain is positive and psi1 < 1.
  void validate() const;
};

struct ControllerOptions {
  double eps_thrust = 1e-6;      // N, lower bound on ‖A‖
  double eps_cross = 1e-6;       // lower bound on ‖b3c × b1d‖
  double omega_dot_step = 1e-4;  // s, central-difference step for Ω̇c
};

struct TrackingErrors {
  Vec3 ex;
  Vec3 ev;
};

TrackingErrors tracking_errors(const Vec3& x, const Vec3& v, const TrajectorySample& cmd);

/// A = −k_x e_x − k_v e_v − k_i sat_σ(e_i) − m g e₃ + m ẍ_d. The thrust
/// direction is b3c = −A/‖A‖.
Vec3 compute_A(const Vec3& ex, const Vec3& ev, const Vec3& ei, const Vec3& a_d, const Gains& g,
               const QuadrotorParams& p);

struct ComputedAttitude {
  Rotation Rc;
  Vec3 Wc = Vec3::Zero();
  Vec3 Wc_dot = Vec3::Zero();
  Vec3 A = Vec3::Zero();
  Vec3 b1c = Vec3::UnitX();
  Vec3 b2c = Vec3::UnitY();
  Vec3 b3c = Vec3::UnitZ();
};

/// b3c = −A/‖A‖, b2c = b3c×b1d/‖b3c×b1d‖, b1c = b2c×b3c. Only Rc, A and the
/// basis are filled. Throws DegenerateThrust or HeadingSingularity.
ComputedAttitude compute_Rc(const Vec3& A, const Vec3& b1d, const ControllerOptions& opt = {});

/// Everything on the translational side of the closed loop, i.e. the part that
/// does not depend on the moment M.
struct ThrustKinematics {
  TrackingErrors err;
  Vec3 sat_ei;
  Vec3 unsaturated;  // 1 where |e_i,k| < σ, 0 otherwise
  Vec3 A;
  Vec3 A_dot;
  double f = 0.0;
  Vec3 v_dot;   // model acceleration under f
  Vec3 ei_dot;  // e_v + c1 e_x
  ComputedAttitude cmd;  // Rc, basis, Wc (Wc_dot left zero)
  double norm_A = 0.0;
  double cross_norm = 0.0;  // ‖b3c × b1d‖
  double beta = 0.0;        // b1d · b3c
  Mat3 a1;                  // ηc = a1 z3
  TrajectorySample ref;
};

ThrustKinematics thrust_kinematics(const FullState& s, const TrajectorySample& ref, const Gains& g,
                                   const QuadrotorParams& p, const ControllerOptions& opt = {});

/// Ωc with hat(Ωc) = Rcᵀ Ṙc along the closed-loop flow; Ωc = a1 ζ3 + a2.
Vec3 compute_Omega_c(const FullState& s, const TrajectorySample& ref, const Gains& g,
                     const QuadrotorParams& p, const ControllerOptions& opt = {});

/// The state reached by following the moment-free part of the closed-loop
/// vector field for time h: (x + h v, v + h v̇, R exp(hΩ), e_i + h ė_i).
/// Ω and e_I are unchanged.
FullState flow_shift(const FullState& s, const ThrustKinematics& k, double h);

/// Ω̇c by a central difference of Ωc along the closed-loop flow.
Vec3 compute_Omega_c_dot(const FullState& s, const Trajectory& traj, double t, const Gains& g,
                         const QuadrotorParams& p, const ControllerOptions& opt = {});

/// M = −k_R e_R − k_Ω e_Ω − k_I e_I + (RᵀRcΩc)^ J RᵀRcΩc + J RᵀRc Ω̇c.
Vec3 attitude_moment(const Mat3& R, const Vec3& W, const Mat3& Rc, const Vec3& Wc,
                     const Vec3& Wc_dot, const Vec3& eI, const Gains& g, const Mat3& J);

/// f = −A · R e₃
double thrust(const Vec3& A, const Mat3& R);

struct IntegralRates {
  Vec3 ei_dot;  // e_v + c1 e_x
  Vec3 eI_dot;  // e_Ω + c2 e_R
};

IntegralRates integral_rates(const Vec3& ex, const Vec3& ev, const Vec3& eR, const Vec3& eW,
                             const Gains& g);

enum class ModeGate { PositionModeOk, AttitudeErrorLarge };

/// Ok iff Ψ(R, Rc) < ψ₁ (strict).
ModeGate mode_gate(const Mat3& R, const Mat3& Rc, double psi1);

struct ControlSolution {
  ControlInput u;
  ThrustKinematics kin;
  Vec3 Wc_dot;
  AttitudeError att;
  Vec3 eW;
  IntegralRates rates;
};

/// Full position-mode control law evaluated at one state and time.
ControlSolution solve_control(const FullState& s, const Trajectory& traj, double t, const Gains& g,
                              const QuadrotorParams& p, const ControllerOptions& opt = {});

}  // namespace se3ekf
