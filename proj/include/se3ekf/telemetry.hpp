#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "se3ekf/scenario.hpp"
#include "se3ekf/state.hpp"

namespace se3ekf {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One row of telemetry. Blocks that were not measured hold NaN.
struct TelemetryRecord {
  double t = 0.0;
  QuadrotorState truth;
  QuadrotorState est;
  Vec3 des_x = Vec3::Zero();
  Vec3 des_v = Vec3::Zero();
  Mat3 des_R = Mat3::Identity();  // computed attitude used by the controller
  Vec3 meas_x = Vec3::Constant(kNaN);
  Mat3 meas_R = Mat3::Constant(kNaN);
  Vec3 meas_W = Vec3::Constant(kNaN);
  Vec3 ebar_x = Vec3::Zero();  // x̄ − x_d
  Vec3 ebar_v = Vec3::Zero();  // v̄ − v_d
  double psi = 0.0;
  double eR_norm = 0.0;
  double eW_norm = 0.0;
  double nees = 0.0;
  double P_min_eig = 0.0;
  double jac_max_rel = kNaN;
};

std::vector<std::string> telemetry_header();

void write_csv(const std::vector<TelemetryRecord>& records, std::ostream& out);
/// Throws ConfigError on I/O failure.
void write_csv(const std::vector<TelemetryRecord>& records, const std::string& path);

/// Reads a file produced by write_csv. Throws ConfigError (with the line
/// number) when the header or a row does not match the schema.
std::vector<TelemetryRecord> read_csv(std::istream& in);
std::vector<TelemetryRecord> read_csv(const std::string& path);

struct MetricsOptions {
  double converge_error = 0.2;
  double window_start = 5.0;
  double window_end = 10.0;
  double tracking_after = 5.0;
};

MetricsOptions metrics_options(const ScenarioConfig& c);

/// Figures of merit computed from telemetry alone.
struct Metrics {
  std::size_t steps = 0;
  double convergence_time = kNaN;  // first t with ‖x̄ − x‖ < converge_error
  double max_position_error = 0.0;
  double max_velocity_error = 0.0;
  double rmse_position = kNaN;  // over the window
  double rmse_velocity = kNaN;
  double rmse_attitude = kNaN;
  double rmse_angular_velocity = kNaN;
  double fd_velocity_rmse = kNaN;  // backward difference of measured positions vs true velocity
  double max_tracking_error_after = kNaN;
  double min_covariance_eigenvalue = std::numeric_limits<double>::infinity();
  double max_nees = 0.0;
  double mean_nees = 0.0;
  double max_jacobian_error = kNaN;
};

Metrics compute_metrics(const std::vector<TelemetryRecord>& records, const MetricsOptions& opt);

struct ThresholdCheck {
  std::string name;
  double value;
  double limit;
  bool passed;
};

/// The enabled checks of `th` applied to `m`.
std::vector<ThresholdCheck> check_thresholds(const Metrics& m, const Thresholds& th);

/// name = value lines, same number format as the CSV.
void write_metrics(const Metrics& m, std::ostream& out);

}  // namespace se3ekf
