#include "se3ekf/geom.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "se3ekf/errors.hpp"

namespace se3ekf {

namespace {
constexpr double kSmallAngle = 1e-8;
}

Rotation Rotation::project(const Mat3& m) {
  if (!m.allFinite()) throw std::invalid_argument("project_so3: non-finite matrix");
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3& s = svd.singularValues();
  if (s(0) <= 0.0 || s(2) <= 1e-12 * s(0)) {
    throw std::invalid_argument("project_so3: singular matrix");
  }
  if (m.determinant() <= 0.0) {
    throw std::invalid_argument("project_so3: determinant must be positive");
  }
  const Mat3& U = svd.matrixU();
  const Mat3& V = svd.matrixV();
  Mat3 D = Mat3::Identity();
  D(2, 2) = (U * V.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return Rotation(U * D * V.transpose(), 0);
}

double Rotation::orthogonality_error() const {
  return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

Mat3 hat(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v(2), v(1),
       v(2), 0.0, -v(0),
       -v(1), v(0), 0.0;
  return s;
}

Vec3 vee(const Mat3& s, double tol) {
  const double asym = (s + s.transpose()).norm();
  if (!(asym <= tol)) {
    throw std::invalid_argument("vee: matrix is not skew-symmetric (‖S+Sᵀ‖=" +
                                std::to_string(asym) + ")");
  }
  return Vec3(s(2, 1), s(0, 2), s(1, 0));
}

Vec3 vee_skew(const Mat3& s) {
  return 0.5 * Vec3(s(2, 1) - s(1, 2), s(0, 2) - s(2, 0), s(1, 0) - s(0, 1));
}

Rotation exp_so3(const Vec3& eta) {
  const double theta = eta.norm();
  const Mat3 K = hat(eta);
  if (theta < kSmallAngle) {
    return Rotation::unchecked(Mat3::Identity() + K + 0.5 * K * K);
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Rotation::unchecked(Mat3::Identity() + a * K + b * K * K);
}

Vec3 log_so3(const Rotation& r, double pi_margin) {
  const Mat3& R = r.matrix();
  const Vec3 w = vee_skew(R);  // sin(θ)·axis
  const double s = w.norm();
  const double c = 0.5 * (R.trace() - 1.0);
  const double theta = std::atan2(s, c);
  if (theta > std::numbers::pi - pi_margin) {
    throw NearSingularRotation("log_so3: rotation angle " + std::to_string(theta) +
                               " is too close to pi");
  }
  if (theta < kSmallAngle) {
    // θ/sin θ = 1 + θ²/6 + O(θ⁴)
    return (1.0 + theta * theta / 6.0) * w;
  }
  return (theta / s) * w;
}

AttitudeError attitude_error(const Mat3& R, const Mat3& R_d) {
  const Mat3 E = R_d.transpose() * R;
  AttitudeError out;
  out.psi = 0.5 * (3.0 - E.trace());
  out.e_R = 0.5 * Vec3(E(2, 1) - E(1, 2), E(0, 2) - E(2, 0), E(1, 0) - E(0, 1));
  return out;
}

Vec3 angular_velocity_error(const Mat3& R, const Vec3& W, const Mat3& R_d, const Vec3& W_d) {
  return W - R.transpose() * (R_d * W_d);
}

VecX sat(double sigma, const VecX& y) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sat: sigma must be positive");
  return y.cwiseMax(-sigma).cwiseMin(sigma);
}

Vec3 sat(double sigma, const Vec3& y) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sat: sigma must be positive");
  return y.cwiseMax(-sigma).cwiseMin(sigma);
}

}  // namespace se3ekf
