#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "se3ekf/trajectory.hpp"

using namespace se3ekf;

namespace {

constexpr double kPi = std::numbers::pi;

// Fourth-order central difference of a sampled quantity.
template <class F>
Vec3 central_diff(F f, double t, double h = 1e-3) {
  return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
}

void expect_consistent_derivatives(const Trajectory& traj) {
  for (double t : {0.0, 0.37, 1.2, 2.9, 5.5, 9.81}) {
    const TrajectorySample s = traj.sample(t);
    auto x = [&](double u) { return traj.sample(u).x; };
    auto v = [&](double u) { return traj.sample(u).v; };
    auto a = [&](double u) { return traj.sample(u).a; };
    auto b1 = [&](double u) { return traj.sample(u).b1; };
    EXPECT_LT((central_diff(x, t) - s.v).norm(), 1e-9) << traj.describe() << " t=" << t;
    EXPECT_LT((central_diff(v, t) - s.a).norm(), 1e-9) << traj.describe() << " t=" << t;
    EXPECT_LT((central_diff(a, t) - s.j).norm(), 1e-8) << traj.describe() << " t=" << t;
    EXPECT_LT((central_diff(b1, t) - s.b1_dot).norm(), 1e-9) << traj.describe() << " t=" << t;
    EXPECT_NEAR(s.b1.norm(), 1.0, 1e-15);
  }
}

TEST(Hover, ConstantCommand) {
  const HoverTrajectory h(Vec3(1, -2, -0.5));
  const TrajectorySample s = h.sample(3.0);
  EXPECT_EQ(s.x, Vec3(1, -2, -0.5));
  EXPECT_EQ(s.v, Vec3::Zero());
  EXPECT_EQ(s.a, Vec3::Zero());
  EXPECT_EQ(s.j, Vec3::Zero());
  EXPECT_EQ(s.b1, kE1);
  EXPECT_EQ(s.b1_dot, Vec3::Zero());
}

TEST(Lissajous, InitialValues) {
  const LissajousTrajectory l(-0.5);
  const TrajectorySample s = l.sample(0.0);
  EXPECT_LT((s.x - Vec3(kPi / 2, 0, -0.5)).norm(), 1e-15);
  EXPECT_LT((s.v - Vec3(1, 2, 0)).norm(), 1e-15);
  EXPECT_EQ(s.b1, kE1);
}

TEST(Lissajous, AltitudeIsAParameter) {
  EXPECT_DOUBLE_EQ(LissajousTrajectory(-0.3).sample(1.0).x.z(), -0.3);
}

TEST(Lissajous, DerivativesMatchFiniteDifferences) {
  expect_consistent_derivatives(LissajousTrajectory(-0.5));
}

TEST(Helix, InitialValuesAndHeading) {
  const HelixTrajectory h(0.4, 0.6, kPi, 0.4);
  EXPECT_LT((h.sample(0.0).x - Vec3(0, 0, -0.6)).norm(), 1e-15);
  EXPECT_LT((h.sample(0.5).b1 - Vec3(0, 1, 0)).norm(), 1e-15);
  EXPECT_LT((h.sample(0.0).b1 - kE1).norm(), 1e-15);
  const double t = 1.3;
  EXPECT_LT((h.sample(t).x - Vec3(0.4 * t, 0.4 * std::sin(kPi * t), -0.6 * std::cos(kPi * t))).norm(),
            1e-15);
}

TEST(Helix, DerivativesMatchFiniteDifferences) {
  expect_consistent_derivatives(HelixTrajectory(0.4, 0.6, kPi, 0.4));
}

TEST(Callable, FallsBackToDifferencedJerk) {
  const CallableTrajectory c([](double t) { return Vec3(std::sin(t), std::cos(2 * t), t * t * t); },
                             [](double t) { return Vec3(std::cos(t), -2 * std::sin(2 * t), 3 * t * t); },
                             [](double t) { return Vec3(-std::sin(t), -4 * std::cos(2 * t), 6 * t); });
  const double t = 0.8;
  const Vec3 jerk(-std::cos(t), 8 * std::sin(2 * t), 6.0);
  EXPECT_LT((c.sample(t).j - jerk).norm(), 1e-6);
}

TEST(Callable, UsesSuppliedJerkAndHeading) {
  const CallableTrajectory c([](double t) { return Vec3(t, 0, 0); }, [](double) { return kE1; },
                             [](double) { return Vec3(Vec3::Zero()); },
                             [](double) { return Vec3(1, 2, 3); },
                             [](double) { return Vec3(Vec3::UnitY()); });
  EXPECT_EQ(c.sample(2.0).j, Vec3(1, 2, 3));
  EXPECT_EQ(c.sample(2.0).b1, kE2);
}

}  // namespace
