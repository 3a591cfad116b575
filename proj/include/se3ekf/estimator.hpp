#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "se3ekf/controller.hpp"
#include "se3ekf/dynamics.hpp"
#include "se3ekf/linearization.hpp"
#include "se3ekf/state.hpp"
#include "se3ekf/trajectory.hpp"

namespace se3ekf {

/// Filter mean and its covariance in reduced coordinates.
struct Estimate {
  FullState mean;
  Mat18 P = Mat18::Identity();
};

/// Default initial covariance: position 10 m², velocity 10 (m/s)², attitude
/// 0.1 rad², angular velocity 0.1 (rad/s)², both integrators 1e-2.
Mat18 default_initial_covariance();

/// A measurement that observes whole blocks of the state. Vector blocks are
/// read directly; the attitude block is the full rotation, compared through
/// the logarithm. Measurements are carried as FullState values in which only
/// the observed blocks are meaningful.
struct MeasurementModel {
  std::string name;
  std::vector<Block> blocks;
  MatX noise;  // p×p, symmetric positive-definite

  int dim() const { return 3 * static_cast<int>(blocks.size()); }

  /// p×18 selection matrix.
  MatX H() const;

  /// z ⊖ h(mean), stacked in block order. The attitude entry is log(R̄ᵀR_z).
  VecX residual(const FullState& z, const FullState& mean) const;
};

/// Position, attitude and angular velocity (p = 9), noise = variance·I.
MeasurementModel model_pos_att_gyro(double variance);
/// Attitude and angular velocity only (p = 6), noise = variance·I.
MeasurementModel model_att_gyro(double variance);
/// Every block (p = 18); used for limit checks.
MeasurementModel model_full(double variance);
/// Look up one of the models above by name. Throws std::invalid_argument.
MeasurementModel model_by_name(const std::string& name, double variance);
std::vector<std::string> model_names();

enum class JacobianSource { Analytic, FiniteDifference };
enum class Transition { FirstOrder, ExactExpm };

struct FilterOptions {
  JacobianSource jacobian = JacobianSource::Analytic;
  Transition transition = Transition::FirstOrder;
  LinearizationOptions linearization;
  double fd_step = 1e-6;
  /// Number of equal sub-intervals per predict call; the Jacobian is
  /// re-evaluated at the start of each.
  int substeps = 1;
  /// With the input held, errors between mean and truth no longer pass
  /// through the controller. HeldInput linearizes the held-input field
  /// instead of the closed loop in predict_held().
  enum class HeldJacobian { ClosedLoop, HeldInput } held_jacobian = HeldJacobian::ClosedLoop;
};

/// Everything the filter needs to evaluate the closed-loop model.
struct FilterModel {
  const Trajectory* trajectory = nullptr;
  Gains gains;
  QuadrotorParams params;
  FilterOptions options;
};

/// Closed-loop Jacobian at `s`, from the assembled blocks or by differencing.
Mat18 system_jacobian(const FullState& s, double t, const FilterModel& m);

/// Φ = I + A dt, or exp(A dt).
Mat18 transition_matrix(const Mat18& A, double dt, Transition kind);

/// Φ P Φᵀ + Qd, symmetrized. Qd is the already-discretized process noise.
Mat18 propagate_covariance(const Mat18& P, const Mat18& Phi, const Mat18& Qd);

/// Closed-loop field in which the plant input is held at `u` while the
/// integrators still follow the errors of the state being integrated.
FullTangent held_input_field(const FullState& s, const ControlInput& u, const Trajectory& traj,
                             double t, const Gains& g, const QuadrotorParams& p,
                             const ControllerOptions& opt = {});

/// Time update. The mean follows the closed-loop field with the control
/// recomputed from the mean; P⁻ = Φ P Φᵀ + Q dt with Φ from the Jacobian at
/// the prior mean.
Estimate predict(const Estimate& est, double t, double dt, const Mat18& Q, const FilterModel& m);

/// Time update with the plant input held at `u` over the step; the covariance
/// is propagated exactly as in predict().
Estimate predict_held(const Estimate& est, const ControlInput& u, double t, double dt,
                      const Mat18& Q, const FilterModel& m);

/// K = P Hᵀ (H P Hᵀ + R)⁻¹. Throws NumericalFailure if the innovation
/// covariance is not positive definite.
MatX kalman_gain(const Mat18& P, const MatX& H, const MatX& noise);

struct UpdateResult {
  Estimate estimate;
  VecX innovation;
  Vec18 correction;
};

/// Measurement update with P⁺ = (I − KH)P⁻, symmetrized, followed by
/// retraction of the mean.
UpdateResult update(const Estimate& prior, const FullState& z, const MeasurementModel& model);

/// Noisy measurement of `truth`: Gaussian noise with the model covariance,
/// added to vector blocks and applied as R·exp(n) to the attitude.
FullState sample_measurement(const FullState& truth, const MeasurementModel& model,
                             std::mt19937_64& rng);

/// eᵀP⁻¹e with e = truth ⊖ mean. Throws NumericalFailure for singular P.
double nees(const Estimate& est, const FullState& truth);

/// Smallest eigenvalue of the symmetric part of P.
double min_eigenvalue(const Mat18& P);

}  // namespace se3ekf
