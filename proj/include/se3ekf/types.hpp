#pragma once

#include <Eigen/Dense>

namespace se3ekf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr int kReducedDim = 18;
using Vec18 = Eigen::Matrix<double, kReducedDim, 1>;
using Mat18 = Eigen::Matrix<double, kReducedDim, kReducedDim>;

/// Three-dimensional blocks of the reduced (error) state, in storage order.
enum class Block : int {
  Position = 0,
  Velocity = 1,
  Attitude = 2,
  AngularVelocity = 3,
  PositionIntegral = 4,
  AttitudeIntegral = 5,
};

constexpr int offset(Block b) { return 3 * static_cast<int>(b); }

inline const Vec3 kE1 = Vec3::UnitX();
inline const Vec3 kE2 = Vec3::UnitY();
inline const Vec3 kE3 = Vec3::UnitZ();

}  // namespace se3ekf
