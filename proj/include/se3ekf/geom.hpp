#pragma once

#include <utility>

#include "se3ekf/types.hpp"

namespace se3ekf {

/// Element of SO(3): a direction-cosine matrix mapping body to inertial
/// coordinates. Every public construction path returns a matrix with
/// ‖RᵀR − I‖_F ≤ 1e-9 and det R = 1 to the same tolerance.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  /// Nearest rotation to `m` in the Frobenius norm. Throws std::invalid_argument
  /// for singular or orientation-reversing input.
  static Rotation project(const Mat3& m);

  /// Wraps `m` without projection. Only for integrator stage values, which are
  /// allowed to leave the manifold between projections.
  static Rotation unchecked(const Mat3& m) { return Rotation(m, 0); }

  const Mat3& matrix() const { return m_; }
  Mat3 transpose_matrix() const { return m_.transpose(); }
  Rotation inverse() const { return Rotation(m_.transpose(), 0); }

  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_, 0); }

  /// ‖RᵀR − I‖_F
  double orthogonality_error() const;

 private:
  Rotation(const Mat3& m, int) : m_(m) {}
  Mat3 m_;
};

Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws std::invalid_argument if ‖S + Sᵀ‖_F > tol.
Vec3 vee(const Mat3& s, double tol = 1e-9);

/// vee of the skew-symmetric part, ½(S − Sᵀ)∨. Never throws.
Vec3 vee_skew(const Mat3& s);

/// Rodrigues formula; second-order series below ‖η‖ = 1e-8.
Rotation exp_so3(const Vec3& eta);

/// Principal logarithm. Throws NearSingularRotation when the angle is within
/// `pi_margin` of π.
Vec3 log_so3(const Rotation& r, double pi_margin = 1e-6);

struct AttitudeError {
  double psi;  ///< ½ tr(I − R_dᵀR), in [0, 2]
  Vec3 e_R;    ///< ½ (R_dᵀR − RᵀR_d)∨
};

AttitudeError attitude_error(const Mat3& R, const Mat3& R_d);
inline AttitudeError attitude_error(const Rotation& R, const Rotation& R_d) {
  return attitude_error(R.matrix(), R_d.matrix());
}

/// e_Ω = Ω − RᵀR_dΩ_d
Vec3 angular_velocity_error(const Mat3& R, const Vec3& W, const Mat3& R_d, const Vec3& W_d);

/// Element-wise clamp to [−σ, σ]. Throws std::invalid_argument for σ ≤ 0.
VecX sat(double sigma, const VecX& y);
Vec3 sat(double sigma, const Vec3& y);

/// Shorthand for Rotation::project.
inline Rotation project_so3(const Mat3& m) { return Rotation::project(m); }

}  // namespace se3ekf
