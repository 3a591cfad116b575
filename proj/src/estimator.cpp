#include "se3ekf/estimator.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "se3ekf/errors.hpp"

namespace se3ekf {

Mat18 default_initial_covariance() {
  Vec18 d;
  d << Vec3::Constant(10.0), Vec3::Constant(10.0), Vec3::Constant(0.1), Vec3::Constant(0.1),
      Vec3::Constant(1e-2), Vec3::Constant(1e-2);
  return d.asDiagonal();
}

MatX MeasurementModel::H() const {
  MatX h = MatX::Zero(dim(), kReducedDim);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    h.block<3, 3>(3 * static_cast<Eigen::Index>(i), offset(blocks[i])).setIdentity();
  }
  return h;
}

VecX MeasurementModel::residual(const FullState& z, const FullState& mean) const {
  VecX r(dim());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block b = blocks[i];
    const Eigen::Index row = 3 * static_cast<Eigen::Index>(i);
    if (b == Block::Attitude) {
      r.segment<3>(row) = log_so3(mean.R.inverse() * z.R);
    } else {
      r.segment<3>(row) = z.block(b) - mean.block(b);
    }
  }
  return r;
}

namespace {

MeasurementModel isotropic(std::string name, std::vector<Block> blocks, double variance) {
  if (!(variance > 0.0)) {
    throw std::invalid_argument("measurement variance must be positive");
  }
  MeasurementModel m{std::move(name), std::move(blocks), MatX()};
  m.noise = variance * MatX::Identity(m.dim(), m.dim());
  return m;
}

}  // namespace

MeasurementModel model_pos_att_gyro(double variance) {
  return isotropic("pos_att_gyro", {Block::Position, Block::Attitude, Block::AngularVelocity},
                   variance);
}

MeasurementModel model_att_gyro(double variance) {
  return isotropic("att_gyro", {Block::Attitude, Block::AngularVelocity}, variance);
}

MeasurementModel model_full(double variance) {
  return isotropic("full",
                   {Block::Position, Block::Velocity, Block::Attitude, Block::AngularVelocity,
                    Block::PositionIntegral, Block::AttitudeIntegral},
                   variance);
}

MeasurementModel model_by_name(const std::string& name, double variance) {
  if (name == "pos_att_gyro") return model_pos_att_gyro(variance);
  if (name == "att_gyro") return model_att_gyro(variance);
  if (name == "full") return model_full(variance);
  throw std::invalid_argument("unknown measurement model '" + name + "'");
}

std::vector<std::string> model_names() { return {"pos_att_gyro", "att_gyro", "full"}; }

Mat18 system_jacobian(const FullState& s, double t, const FilterModel& m) {
  if (m.trajectory == nullptr) throw std::invalid_argument("filter model has no trajectory");
  if (m.options.jacobian == JacobianSource::Analytic) {
    return assemble_A_L(s, *m.trajectory, t, m.gains, m.params, m.options.linearization).matrix();
  }
  const FullField field = [&](const FullState& q, double tq) {
    return closed_loop_field(q, *m.trajectory, tq, m.gains, m.params,
                             m.options.linearization.controller);
  };
  return fd_jacobian(field, s, t, m.options.fd_step);
}

Mat18 transition_matrix(const Mat18& A, double dt, Transition kind) {
  if (kind == Transition::ExactExpm) {
    const Mat18 Adt = A * dt;
    return Adt.exp();
  }
  return Mat18::Identity() + A * dt;
}

Mat18 propagate_covariance(const Mat18& P, const Mat18& Phi, const Mat18& Qd) {
  const Mat18 out = Phi * P * Phi.transpose() + Qd;
  return 0.5 * (out + out.transpose());
}

FullTangent held_input_field(const FullState& s, const ControlInput& u, const Trajectory& traj,
                             double t, const Gains& g, const QuadrotorParams& p,
                             const ControllerOptions& opt) {
  const ControlSolution c = solve_control(s, traj, t, g, p, opt);
  const PlantTangent d = state_derivative(s.plant(), u, p);
  FullTangent k;
  k.x_dot = d.x_dot;
  k.v_dot = d.v_dot;
  k.R_dot = d.R_dot;
  k.W_dot = d.W_dot;
  k.ei_dot = c.rates.ei_dot;
  k.eI_dot = c.rates.eI_dot;
  return k;
}

namespace {

Estimate predict_with(const Estimate& est, const FullField& field, double t, double dt,
                      const Mat18& Q, const FilterModel& m, bool linearize_field = false) {
  if (m.options.substeps < 1) throw std::invalid_argument("filter substeps must be at least 1");
  const int n = m.options.substeps;
  const double h = dt / n;
  Estimate out = est;
  for (int i = 0; i < n; ++i) {
    const double ti = t + i * h;
    const Mat18 A = linearize_field ? fd_jacobian(field, out.mean, ti, m.options.fd_step)
                                    : system_jacobian(out.mean, ti, m);
    const Mat18 Phi = transition_matrix(A, h, m.options.transition);
    out.mean = rk4_step(out.mean, field, ti, h);
    out.P = propagate_covariance(out.P, Phi, Q * h);
  }
  if (!out.P.allFinite()) throw NumericalFailure("covariance became non-finite in predict");
  return out;
}

}  // namespace

Estimate predict(const Estimate& est, double t, double dt, const Mat18& Q, const FilterModel& m) {
  if (m.trajectory == nullptr) throw std::invalid_argument("filter model has no trajectory");
  const ControllerOptions& copt = m.options.linearization.controller;
  const FullField field = [&](const FullState& s, double ts) {
    return closed_loop_field(s, *m.trajectory, ts, m.gains, m.params, copt);
  };
  return predict_with(est, field, t, dt, Q, m);
}

Estimate predict_held(const Estimate& est, const ControlInput& u, double t, double dt,
                      const Mat18& Q, const FilterModel& m) {
  if (m.trajectory == nullptr) throw std::invalid_argument("filter model has no trajectory");
  const ControllerOptions& copt = m.options.linearization.controller;
  const FullField field = [&](const FullState& s, double ts) {
    return held_input_field(s, u, *m.trajectory, ts, m.gains, m.params, copt);
  };
  return predict_with(est, field, t, dt, Q, m,
                      m.options.held_jacobian == FilterOptions::HeldJacobian::HeldInput);
}

MatX kalman_gain(const Mat18& P, const MatX& H, const MatX& noise) {
  if (H.cols() != kReducedDim || noise.rows() != H.rows() || noise.cols() != H.rows()) {
    throw std::invalid_argument("kalman_gain: dimension mismatch");
  }
  const MatX S = H * P * H.transpose() + noise;
  const Eigen::LLT<MatX> llt(0.5 * (S + S.transpose()));
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("innovation covariance is not positive definite");
  }
  // K = P Hᵀ S⁻¹  ⇔  S Kᵀ = H P
  const MatX Kt = llt.solve(H * P);
  if (!Kt.allFinite()) throw NumericalFailure("Kalman gain is not finite");
  return Kt.transpose();
}

UpdateResult update(const Estimate& prior, const FullState& z, const MeasurementModel& model) {
  const MatX H = model.H();
  const MatX K = kalman_gain(prior.P, H, model.noise);
  UpdateResult r;
  r.innovation = model.residual(z, prior.mean);
  r.correction = K * r.innovation;
  r.estimate.mean = retract(prior.mean, r.correction);
  const Mat18 P = (Mat18::Identity() - K * H) * prior.P;
  r.estimate.P = 0.5 * (P + P.transpose());
  return r;
}

FullState sample_measurement(const FullState& truth, const MeasurementModel& model,
                             std::mt19937_64& rng) {
  // Square root of the covariance through its eigen-decomposition, which also
  // admits a zero covariance.
  const Eigen::SelfAdjointEigenSolver<MatX> eig(model.noise);
  const VecX sd = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const MatX root = eig.eigenvectors() * sd.asDiagonal();

  std::normal_distribution<double> normal(0.0, 1.0);
  VecX xi(model.dim());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = normal(rng);
  const VecX n = root * xi;

  FullState z = truth;
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    const Block b = model.blocks[i];
    const Vec3 ni = n.segment<3>(3 * static_cast<Eigen::Index>(i));
    if (b == Block::Attitude) {
      z.R = Rotation::project((truth.R * exp_so3(ni)).matrix());
    } else {
      z.block(b) += ni;
    }
  }
  return z;
}

double nees(const Estimate& est, const FullState& truth) {
  const Vec18 e = difference(truth, est.mean);
  const Eigen::FullPivLU<Mat18> lu(est.P);
  if (!lu.isInvertible()) throw NumericalFailure("covariance is singular");
  return e.dot(lu.solve(e));
}

double min_eigenvalue(const Mat18& P) {
  const Eigen::SelfAdjointEigenSolver<Mat18> eig(0.5 * (P + P.transpose()),
                                                 Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace se3ekf
