#include "se3ekf/harness.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "se3ekf/config.hpp"
#include "se3ekf/errors.hpp"
#include "se3ekf/estimator.hpp"
#include "se3ekf/jacobian_check.hpp"
#include "se3ekf/linearization.hpp"

namespace se3ekf {

int exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::Ok:
      return 0;
    case RunStatus::ThresholdFailure:
      return 1;
    case RunStatus::DegenerateAbort:
      return 2;
  }
  return 2;
}

namespace {

bool observes(const MeasurementModel& m, Block b) {
  for (Block x : m.blocks) {
    if (x == b) return true;
  }
  return false;
}

std::string describe_state(const FullState& s) {
  std::ostringstream o;
  auto v = [&](const char* n, const Vec3& x) {
    o << ' ' << n << "=[" << format_double(x(0)) << ',' << format_double(x(1)) << ','
      << format_double(x(2)) << ']';
  };
  v("x", s.x);
  v("v", s.v);
  v("sin_axis", vee_skew(s.R.matrix()));
  v("W", s.W);
  v("ei", s.ei);
  v("eI", s.eI);
  return o.str();
}

void inject_process_noise(FullState& s, double variance, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance));
  for (int i = 0; i < 3; ++i) s.v(i) += n(rng);
  for (int i = 0; i < 3; ++i) s.W(i) += n(rng);
}

}  // namespace

RunResult run(const ScenarioConfig& c) {
  c.validate();
  RunResult result;
  const std::unique_ptr<Trajectory> traj = c.trajectory.build();
  const MeasurementModel model = model_by_name(c.measurement_model, c.measurement_noise);
  MeasurementModel sampler = model;
  sampler.noise *= c.measurement_sample_scale * c.measurement_sample_scale;

  FilterModel fm;
  fm.trajectory = traj.get();
  fm.gains = c.gains;
  fm.params = c.params;
  fm.options = c.filter;
  fm.options.linearization.controller = c.controller;
  const Mat18 Q = c.process_noise * Mat18::Identity();

  std::seed_seq meas_seed{static_cast<std::uint32_t>(c.seed), static_cast<std::uint32_t>(c.seed >> 32), 1u};
  std::seed_seq proc_seed{static_cast<std::uint32_t>(c.seed), static_cast<std::uint32_t>(c.seed >> 32), 2u};
  std::mt19937_64 meas_rng(meas_seed);
  std::mt19937_64 proc_rng(proc_seed);

  FullState truth = c.initial_truth;
  Estimate est;
  est.mean = c.initial_estimate;
  est.P = c.initial_covariance_diag.asDiagonal();
  result.initial_position_error = (est.mean.x - truth.x).norm();
  result.initial_velocity_error = (est.mean.v - truth.v).norm();

  const FullField truth_field = [&](const FullState& s, double t) {
    return closed_loop_field(s, *traj, t, c.gains, c.params, c.controller);
  };

  const long steps = std::lround(c.duration / c.dt);
  long gate_count = 0;
  result.records.reserve(static_cast<std::size_t>(steps) + 1);
  double t = 0.0;
  try {
    for (long k = 0; k <= steps; ++k) {
      t = static_cast<double>(k) * c.dt;
      const FullState z = sample_measurement(truth, sampler, meas_rng);
      est = update(est, z, model).estimate;

      const ControlSolution ctrl_est = solve_control(est.mean, *traj, t, c.gains, c.params, c.controller);
      const ControlSolution ctrl = c.feedback == FeedbackMode::Truth
                                       ? solve_control(truth, *traj, t, c.gains, c.params, c.controller)
                                       : ctrl_est;

      const TrajectorySample ref = traj->sample(t);
      TelemetryRecord r;
      r.t = t;
      r.truth = truth.plant();
      r.est = est.mean.plant();
      r.des_x = ref.x;
      r.des_v = ref.v;
      r.des_R = ctrl.kin.cmd.Rc.matrix();
      if (observes(model, Block::Position)) r.meas_x = z.x;
      if (observes(model, Block::Attitude)) r.meas_R = z.R.matrix();
      if (observes(model, Block::AngularVelocity)) r.meas_W = z.W;
      r.ebar_x = est.mean.x - ref.x;
      r.ebar_v = est.mean.v - ref.v;
      r.psi = ctrl.att.psi;
      r.eR_norm = ctrl.att.e_R.norm();
      r.eW_norm = ctrl.eW.norm();
      try {
        r.nees = nees(est, truth);
      } catch (const NumericalFailure&) {
        r.nees = kNaN;
      }
      r.P_min_eig = min_eigenvalue(est.P);
      if (c.jacobian_check) {
        r.jac_max_rel = compare_jacobians(est.mean, *traj, t, c.gains, c.params,
                                          fm.options.linearization, c.filter.fd_step)
                            .max_block_rel();
      }
      result.records.push_back(r);

      const FullState& controlled = c.feedback == FeedbackMode::Truth ? truth : est.mean;
      if (mode_gate(controlled.R.matrix(), ctrl.kin.cmd.Rc.matrix(), c.gains.psi1) !=
          ModeGate::PositionModeOk) {
        if (gate_count++ == 0) {
          result.warnings.push_back("t=" + format_double(t) + ": attitude error " +
                                    format_double(ctrl.att.psi) + " is not below psi1 = " +
                                    format_double(c.gains.psi1) +
                                    (ctrl.att.psi >= 1.0 ? " (outside the position-mode basin)"
                                                         : ""));
        }
      }

      if (k == steps) break;
      if (c.feedback == FeedbackMode::Truth) {
        truth = rk4_step(truth, truth_field, t, c.dt);
        est = predict(est, t, c.dt, Q, fm);
      } else {
        const ControlInput u = ctrl_est.u;
        const FullField held = [&](const FullState& s, double ts) {
          return held_input_field(s, u, *traj, ts, c.gains, c.params, c.controller);
        };
        truth = rk4_step(truth, held, t, c.dt);
        est = predict_held(est, u, t, c.dt, Q, fm);
      }
      if (c.truth_process_noise > 0.0) {
        inject_process_noise(truth, c.truth_process_noise * c.dt, proc_rng);
      }
    }
  } catch (const std::runtime_error& e) {
    const bool degenerate = dynamic_cast<const DegenerateThrust*>(&e) ||
                            dynamic_cast<const HeadingSingularity*>(&e) ||
                            dynamic_cast<const NearSingularRotation*>(&e) ||
                            dynamic_cast<const NumericalFailure*>(&e);
    if (!degenerate) throw;
    result.status = RunStatus::DegenerateAbort;
    result.diagnostic = "t=" + format_double(t) + ": " + e.what() + "; truth" +
                        describe_state(truth) + "; estimate" + describe_state(est.mean);
  }
  if (gate_count > 1) {
    result.warnings.push_back("attitude-error gate flagged at " + std::to_string(gate_count) +
                              " steps");
  }

  result.metrics = compute_metrics(result.records, metrics_options(c));
  result.checks = check_thresholds(result.metrics, c.thresholds);
  if (result.status == RunStatus::Ok) {
    for (const ThresholdCheck& ch : result.checks) {
      if (!ch.passed) result.status = RunStatus::ThresholdFailure;
    }
  }
  return result;
}

}  // namespace se3ekf
