#include "se3ekf/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace se3ekf {

HoverTrajectory::HoverTrajectory(Vec3 position, Vec3 heading)
    : position_(std::move(position)), heading_(heading.normalized()) {}

TrajectorySample HoverTrajectory::sample(double) const {
  TrajectorySample s;
  s.x = position_;
  s.b1 = heading_;
  return s;
}

std::string HoverTrajectory::describe() const {
  std::ostringstream os;
  os << "hover at [" << position_.transpose() << "]";
  return os.str();
}

LissajousTrajectory::LissajousTrajectory(double altitude) : altitude_(altitude) {}

TrajectorySample LissajousTrajectory::sample(double t) const {
  const double s1 = std::sin(t), c1 = std::cos(t);
  const double s2 = std::sin(2.0 * t), c2 = std::cos(2.0 * t);
  TrajectorySample s;
  s.x = Vec3(s1 + std::numbers::pi / 2.0, s2, altitude_);
  s.v = Vec3(c1, 2.0 * c2, 0.0);
  s.a = Vec3(-s1, -4.0 * s2, 0.0);
  s.j = Vec3(-c1, -8.0 * c2, 0.0);
  s.b1 = Vec3::UnitX();
  s.b1_dot = Vec3::Zero();
  return s;
}

std::string LissajousTrajectory::describe() const {
  std::ostringstream os;
  os << "lissajous altitude=" << altitude_;
  return os.str();
}

HelixTrajectory::HelixTrajectory(double a, double b, double w, double speed)
    : a_(a), b_(b), w_(w), speed_(speed) {}

TrajectorySample HelixTrajectory::sample(double t) const {
  const double s = std::sin(w_ * t), c = std::cos(w_ * t);
  const double w2 = w_ * w_, w3 = w2 * w_;
  TrajectorySample out;
  out.x = Vec3(speed_ * t, a_ * s, -b_ * c);
  out.v = Vec3(speed_, a_ * w_ * c, b_ * w_ * s);
  out.a = Vec3(0.0, -a_ * w2 * s, b_ * w2 * c);
  out.j = Vec3(0.0, -a_ * w3 * c, -b_ * w3 * s);
  out.b1 = Vec3(c, s, 0.0);
  out.b1_dot = Vec3(-w_ * s, w_ * c, 0.0);
  return out;
}

std::string HelixTrajectory::describe() const {
  std::ostringstream os;
  os << "helix a=" << a_ << " b=" << b_ << " w=" << w_ << " speed=" << speed_;
  return os.str();
}

CallableTrajectory::CallableTrajectory(VecFn position, VecFn velocity, VecFn acceleration,
                                       std::optional<VecFn> jerk, VecFn heading,
                                       VecFn heading_rate, double fd_step)
    : position_(std::move(position)),
      velocity_(std::move(velocity)),
      acceleration_(std::move(acceleration)),
      jerk_(std::move(jerk)),
      heading_(std::move(heading)),
      heading_rate_(std::move(heading_rate)),
      fd_step_(fd_step) {
  if (!(fd_step_ > 0.0)) throw std::invalid_argument("CallableTrajectory: fd_step must be positive");
}

TrajectorySample CallableTrajectory::sample(double t) const {
  TrajectorySample s;
  s.x = position_(t);
  s.v = velocity_(t);
  s.a = acceleration_(t);
  s.j = jerk_ ? (*jerk_)(t)
              : Vec3((acceleration_(t + fd_step_) - acceleration_(t - fd_step_)) / (2.0 * fd_step_));
  s.b1 = heading_(t);
  s.b1_dot = heading_rate_(t);
  return s;
}

}  // namespace se3ekf
