#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "se3ekf/types.hpp"

namespace se3ekf {

/// Position command and its first three derivatives plus the heading
/// direction b1d (unit) and its rate, all evaluated at one instant.
struct TrajectorySample {
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  Vec3 j = Vec3::Zero();
  Vec3 b1 = Vec3::UnitX();
  Vec3 b1_dot = Vec3::Zero();
};

class Trajectory {
 public:
  virtual ~Trajectory() = default;
  virtual TrajectorySample sample(double t) const = 0;
  virtual std::string describe() const = 0;
};

/// Constant position and heading.
class HoverTrajectory final : public Trajectory {
 public:
  explicit HoverTrajectory(Vec3 position = Vec3::Zero(), Vec3 heading = Vec3::UnitX());
  TrajectorySample sample(double t) const override;
  std::string describe() const override;
  const Vec3& position() const { return position_; }

 private:
  Vec3 position_;
  Vec3 heading_;
};

/// x_d = [sin t + π/2, sin 2t, altitude], b1d = e1.
class LissajousTrajectory final : public Trajectory {
 public:
  explicit LissajousTrajectory(double altitude);
  TrajectorySample sample(double t) const override;
  std::string describe() const override;
  double altitude() const { return altitude_; }

 private:
  double altitude_;
};

/// x_d = [speed·t, a sin wt, −b cos wt], b1d = [cos wt, sin wt, 0].
class HelixTrajectory final : public Trajectory {
 public:
  HelixTrajectory(double a, double b, double w, double speed);
  TrajectorySample sample(double t) const override;
  std::string describe() const override;
  double a() const { return a_; }
  double b() const { return b_; }
  double w() const { return w_; }
  double speed() const { return speed_; }

 private:
  double a_, b_, w_, speed_;
};

/// User-supplied command. When no jerk callback is given the jerk is taken by
/// a central difference of the acceleration with step `fd_step`.
class CallableTrajectory final : public Trajectory {
 public:
  using VecFn = std::function<Vec3(double)>;

  CallableTrajectory(VecFn position, VecFn velocity, VecFn acceleration,
                     std::optional<VecFn> jerk = std::nullopt,
                     VecFn heading = [](double) { return Vec3(Vec3::UnitX()); },
                     VecFn heading_rate = [](double) { return Vec3(Vec3::Zero()); },
                     double fd_step = 1e-4);
  TrajectorySample sample(double t) const override;
  std::string describe() const override { return "callable"; }

 private:
  VecFn position_, velocity_, acceleration_;
  std::optional<VecFn> jerk_;
  VecFn heading_, heading_rate_;
  double fd_step_;
};

}  // namespace se3ekf
