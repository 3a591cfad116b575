#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "se3ekf/controller.hpp"
#include "se3ekf/dynamics.hpp"
#include "se3ekf/estimator.hpp"
#include "se3ekf/state.hpp"
#include "se3ekf/trajectory.hpp"

namespace se3ekf {

enum class TrajectoryKind { Hover, Lissajous, Helix };

struct TrajectoryConfig {
  TrajectoryKind kind = TrajectoryKind::Hover;
  Vec3 hover_position = Vec3::Zero();
  Vec3 hover_heading = Vec3::UnitX();
  double altitude = 0.0;  // lissajous
  double helix_a = 0.0;
  double helix_b = 0.0;
  double helix_w = 0.0;
  double helix_speed = 0.0;

  std::unique_ptr<Trajectory> build() const;
};

/// Which state the controller acts on.
///   Truth:    the vehicle is flown on its own state; the filter runs alongside.
///   Estimate: the vehicle is flown on the a-posteriori mean, input held over
///             each step.
enum class FeedbackMode { Truth, Estimate };

/// Pass/fail limits checked at the end of a run. A value of zero (or a
/// negative value) disables the check.
struct Thresholds {
  double converge_error = 0.0;        // m; ‖x̄ − x‖ must drop below this ...
  double converge_time = 0.0;         // s; ... no later than this
  double max_position_error = 0.0;    // m; max ‖x̄ − x‖ over the run
  double max_velocity_error = 0.0;    // m/s; max ‖v̄ − v‖ over the run
  double velocity_rmse_ratio = 0.0;   // differenced-measurement RMSE / filter RMSE
  double max_tracking_error = 0.0;    // m; max ‖x − x_d‖ for t ≥ tracking_after
  double tracking_after = 0.0;        // s
  double min_covariance_eigenvalue = -1e-10;  // always checked
};

struct ScenarioConfig {
  std::string name;
  double duration = 10.0;
  double dt = 0.01;
  std::uint64_t seed = 1;

  Gains gains;
  QuadrotorParams params;
  ControllerOptions controller;
  TrajectoryConfig trajectory;
  FeedbackMode feedback = FeedbackMode::Truth;

  FilterOptions filter;
  std::string measurement_model = "pos_att_gyro";
  double measurement_noise = 1.0;  // isotropic variance
  double process_noise = 0.01;     // isotropic continuous-time spectral density
  double truth_process_noise = 0.0;  // variance rate of noise injected into v and Ω
  /// Multiplies the standard deviation of the noise actually added to the
  /// simulated measurements; the filter keeps using measurement_noise. Zero
  /// gives exact measurements.
  double measurement_sample_scale = 1.0;

  FullState initial_truth;
  FullState initial_estimate;
  Vec18 initial_covariance_diag = default_initial_covariance().diagonal();

  /// Window for the RMSE metrics.
  double window_start = 5.0;
  double window_end = 10.0;
  Thresholds thresholds;

  /// Compare the assembled Jacobian with finite differences at every step and
  /// record the worst block error.
  bool jacobian_check = false;

  /// Throws ConfigError when a field is out of range or a name is unknown.
  void validate() const;
};

/// Position tracking of a Lissajous figure with a large initial estimate
/// error, position/attitude/rate measurements.
ScenarioConfig scenario_example1();

/// Helix with rotating heading, attitude and rate measurements only.
ScenarioConfig scenario_example2();

/// Lissajous figure at −0.3 m with the softer flight-test gain set.
ScenarioConfig scenario_experiment_replay();

struct ScenarioInfo {
  std::string name;
  std::string summary;
  ScenarioConfig (*make)();
};

const std::vector<ScenarioInfo>& scenario_registry();

/// Throws ConfigError for an unknown name.
ScenarioConfig scenario_by_name(const std::string& name);

}  // namespace se3ekf
