#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Cholesky>

#include "se3ekf/errors.hpp"
#include "se3ekf/estimator.hpp"
#include "test_support.hpp"

using namespace se3ekf;
using se3ekf::testing::random_full_state;
using se3ekf::testing::random_vec;

namespace {

Mat18 random_spd(std::mt19937_64& rng, double floor = 0.1) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat18 G;
  for (int i = 0; i < 18; ++i)
    for (int j = 0; j < 18; ++j) G(i, j) = n(rng);
  return G * G.transpose() / 18.0 + floor * Mat18::Identity();
}

TEST(Transition, ZeroJacobianLeavesCovarianceAlone) {
  std::mt19937_64 rng(61);
  const Mat18 P = random_spd(rng);
  for (Transition kind : {Transition::FirstOrder, Transition::ExactExpm}) {
    const Mat18 Phi = transition_matrix(Mat18::Zero(), 0.01, kind);
    EXPECT_EQ(Phi, Mat18::Identity());
    EXPECT_LT((propagate_covariance(P, Phi, Mat18::Zero()) - P).cwiseAbs().maxCoeff(), 1e-15);
    const double q = 0.3;
    const Mat18 Pq = propagate_covariance(P, Phi, q * Mat18::Identity());
    EXPECT_LT((Pq - (P + q * Mat18::Identity())).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Transition, FirstOrderAndExponential) {
  std::mt19937_64 rng(62);
  Mat18 A = random_spd(rng, 0.0);
  EXPECT_LT((transition_matrix(A, 0.01, Transition::FirstOrder) - (Mat18::Identity() + 0.01 * A)).norm(), 1e-15);
  // Strictly upper-triangular A is nilpotent, so the exponential series terminates.
  Mat18 N = A.triangularView<Eigen::StrictlyUpper>();
  Mat18 series = Mat18::Identity(), term = Mat18::Identity();
  for (int k = 1; k < 18; ++k) {
    term = term * N * 0.1 / k;
    series += term;
  }
  EXPECT_LT((transition_matrix(N, 0.1, Transition::ExactExpm) - series).norm(), 1e-10 * series.norm());
}

TEST(Propagate, OutputIsExactlySymmetric) {
  std::mt19937_64 rng(63);
  const Mat18 P = random_spd(rng);
  const Mat18 Phi = Mat18::Identity() + 0.05 * random_spd(rng, 0.0);
  const Mat18 out = propagate_covariance(P, Phi, 1e-3 * Mat18::Identity());
  EXPECT_EQ(out, out.transpose());
}

TEST(KalmanGain, UnitPriorAndUnitNoiseHalves) {
  Estimate prior;
  prior.P = Mat18::Identity();
  const MeasurementModel full = model_full(1.0);
  const MatX K = kalman_gain(prior.P, full.H(), full.noise);
  EXPECT_LT((K - 0.5 * MatX::Identity(18, 18)).cwiseAbs().maxCoeff(), 1e-15);
  std::mt19937_64 rng(64);
  const FullState z = random_full_state(rng, 0.1);
  const UpdateResult r = update(prior, z, full);
  EXPECT_LT((r.estimate.P - 0.5 * Mat18::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(KalmanGain, RejectsIndefiniteInnovation) {
  const MeasurementModel m = model_pos_att_gyro(1.0);
  EXPECT_THROW(kalman_gain(Mat18::Zero(), m.H(), -MatX::Identity(9, 9)), NumericalFailure);
  EXPECT_THROW(kalman_gain(Mat18::Identity(), m.H(), MatX::Identity(6, 6)), std::invalid_argument);
}

TEST(Update, ExactMeasurementLimit) {
  std::mt19937_64 rng(65);
  Estimate prior;
  prior.mean = random_full_state(rng);
  prior.P = random_spd(rng);
  FullState z = retract(prior.mean, 0.3 * Vec18::Random());
  const UpdateResult r = update(prior, z, model_full(1e-9));
  EXPECT_LT(difference(z, r.estimate.mean).norm(), 1e-6);
  EXPECT_LT((r.estimate.mean.x - z.x).norm(), 1e-8);
  EXPECT_LT((r.estimate.mean.R.matrix() - z.R.matrix()).norm(), 1e-8);
}

TEST(Update, UninformativeMeasurementLimit) {
  std::mt19937_64 rng(66);
  Estimate prior;
  prior.mean = random_full_state(rng);
  prior.P = random_spd(rng);
  for (const MeasurementModel& m : {model_full(1e9), model_pos_att_gyro(1e9), model_att_gyro(1e9)}) {
    const FullState z = retract(prior.mean, 0.5 * Vec18::Random());
    const UpdateResult r = update(prior, z, m);
    EXPECT_LT(r.correction.norm(), 1e-6 * r.innovation.norm()) << m.name;
    EXPECT_LT(difference(prior.mean, r.estimate.mean).norm(), 1e-6 * r.innovation.norm()) << m.name;
  }
}

TEST(Update, JosephFormAgreesWithOptimalGain) {
  std::mt19937_64 rng(67);
  for (const MeasurementModel& m : {model_pos_att_gyro(0.5), model_att_gyro(0.1), model_full(2.0)}) {
    for (int i = 0; i < 10; ++i) {
      const Mat18 P = random_spd(rng, 0.01);
      const MatX H = m.H();
      const MatX K = kalman_gain(P, H, m.noise);
      const Mat18 IKH = Mat18::Identity() - K * H;
      const Mat18 joseph = IKH * P * IKH.transpose() + K * m.noise * K.transpose();
      Estimate prior;
      prior.P = P;
      const UpdateResult r = update(prior, prior.mean, m);
      EXPECT_LT((joseph - r.estimate.P).cwiseAbs().maxCoeff(), 1e-9) << m.name;
      EXPECT_EQ(r.estimate.P, r.estimate.P.transpose());
    }
  }
}

TEST(Update, MeanAttitudeStaysOnSO3) {
  std::mt19937_64 rng(68);
  Estimate prior;
  prior.mean = random_full_state(rng);
  prior.P = random_spd(rng);
  const UpdateResult r = update(prior, random_full_state(rng), model_full(0.2));
  EXPECT_LT(r.estimate.mean.R.orthogonality_error(), 1e-12);
  EXPECT_NEAR(r.estimate.mean.R.matrix().determinant(), 1.0, 1e-12);
}

TEST(Models, PositionAttitudeGyroMatrix) {
  const MeasurementModel m = model_pos_att_gyro(1.0);
  EXPECT_EQ(m.dim(), 9);
  MatX expected = MatX::Zero(9, 18);
  expected.block<3, 3>(0, 0).setIdentity();
  expected.block<3, 3>(3, 6).setIdentity();
  expected.block<3, 3>(6, 9).setIdentity();
  EXPECT_EQ(m.H(), expected);
  EXPECT_EQ(m.noise, MatX::Identity(9, 9));
}

TEST(Models, AttitudeGyroMatrix) {
  const MeasurementModel m = model_att_gyro(0.1);
  EXPECT_EQ(m.dim(), 6);
  MatX expected = MatX::Zero(6, 18);
  expected.block<3, 3>(0, 6).setIdentity();
  expected.block<3, 3>(3, 9).setIdentity();
  EXPECT_EQ(m.H(), expected);
  EXPECT_EQ(m.H().leftCols(6), MatX::Zero(6, 6));
}

TEST(Models, LookupAndValidation) {
  for (const std::string& n : model_names()) EXPECT_EQ(model_by_name(n, 1.0).name, n);
  EXPECT_THROW(model_by_name("gps", 1.0), std::invalid_argument);
  EXPECT_THROW(model_full(0.0), std::invalid_argument);
}

TEST(Models, Residuals) {
  std::mt19937_64 rng(69);
  const FullState mean = random_full_state(rng);
  const MeasurementModel m = model_pos_att_gyro(1.0);
  EXPECT_LT(m.residual(mean, mean).norm(), 1e-15);
  FullState z = mean;
  z.R = mean.R * exp_so3(Vec3(0.01, 0, 0));
  const VecX r = m.residual(z, mean);
  EXPECT_LT((r.segment<3>(3) - Vec3(0.01, 0, 0)).norm(), 1e-12);
  EXPECT_EQ(r.head<3>(), Vec3::Zero());
  EXPECT_LT(model_att_gyro(1.0).residual(mean, mean).norm(), 1e-15);
}

TEST(SampleMeasurement, ZeroCovarianceReturnsTruth) {
  std::mt19937_64 rng(70);
  const FullState truth = random_full_state(rng);
  MeasurementModel m = model_pos_att_gyro(1.0);
  m.noise.setZero();
  const FullState z = sample_measurement(truth, m, rng);
  EXPECT_EQ(z.x, truth.x);
  EXPECT_EQ(z.W, truth.W);
  EXPECT_LT((z.R.matrix() - truth.R.matrix()).norm(), 1e-15);
}

TEST(SampleMeasurement, PositionSampleMeanConverges) {
  std::mt19937_64 rng(71);
  FullState truth;
  truth.x = Vec3(1, -2, 3);
  const double var = 0.25;
  const MeasurementModel m = model_pos_att_gyro(var);
  const int n = 100000;
  Vec3 sum = Vec3::Zero();
  for (int i = 0; i < n; ++i) sum += sample_measurement(truth, m, rng).x;
  const Vec3 mean = sum / n;
  EXPECT_LT((mean - truth.x).cwiseAbs().maxCoeff(), 3.0 * std::sqrt(var / n));
}

TEST(SampleMeasurement, SeededSequenceIsReproducible) {
  const FullState truth;
  const MeasurementModel m = model_pos_att_gyro(1.0);
  std::mt19937_64 a(72), b(72);
  for (int i = 0; i < 50; ++i) {
    const FullState za = sample_measurement(truth, m, a), zb = sample_measurement(truth, m, b);
    ASSERT_EQ(za.x, zb.x);
    ASSERT_EQ(za.R.matrix(), zb.R.matrix());
    ASSERT_EQ(za.W, zb.W);
  }
}

TEST(Nees, SimpleCases) {
  std::mt19937_64 rng(73);
  Estimate est;
  est.mean = random_full_state(rng);
  est.P = random_spd(rng);
  EXPECT_LT(nees(est, est.mean), 1e-28);
  est.P = Mat18::Identity();
  FullState truth = est.mean;
  truth.v += Vec3(0.6, 0.8, 0.0);
  EXPECT_NEAR(nees(est, truth), 1.0, 1e-14);
  est.P(4, 4) = 0.0;
  EXPECT_THROW(nees(est, truth), NumericalFailure);
}

// Monte-Carlo consistency on repeated updates of a static state: when the
// prior is drawn from its own covariance the time-averaged NEES of each run
// has mean 18, and the run average must fall inside the 95% band.
TEST(Nees, MonteCarloConsistency) {
  std::mt19937_64 rng(74);
  std::normal_distribution<double> n(0.0, 1.0);
  const MeasurementModel m = model_full(0.02);
  const int runs = 200, steps = 10;
  double total = 0.0;
  for (int run = 0; run < runs; ++run) {
    const FullState truth = random_full_state(rng);
    Estimate est;
    est.P = 0.01 * Mat18::Identity();
    Vec18 xi;
    for (int i = 0; i < 18; ++i) xi(i) = n(rng);
    est.mean = retract(truth, Eigen::LLT<Mat18>(est.P).matrixL() * xi);
    double acc = 0.0;
    for (int k = 0; k < steps; ++k) {
      est = update(est, sample_measurement(truth, m, rng), m).estimate;
      acc += nees(est, truth);
    }
    total += acc / steps;
  }
  const double mean = total / runs;
  const double half_band = 1.96 * std::sqrt(2.0 * 18.0 / runs);
  EXPECT_GT(mean, 18.0 - half_band);
  EXPECT_LT(mean, 18.0 + half_band);
}

TEST(MinEigenvalue, MatchesDiagonal) {
  Vec18 d = Vec18::LinSpaced(0.5, 9.0);
  d(7) = -0.25;
  EXPECT_NEAR(min_eigenvalue(d.asDiagonal()), -0.25, 1e-15);
}

struct TwinSetup {
  LissajousTrajectory traj{-0.5};
  FilterModel model;
  TwinSetup() {
    model.trajectory = &traj;
    model.params.force_disturbance = Vec3(-0.02, 0.01, -0.03);
    model.params.moment_disturbance = Vec3(0.01, -0.02, 0.01);
  }
};

TEST(Predict, ZeroNoiseTwinTracksTruth) {
  TwinSetup su;
  FullState truth;
  Estimate est;
  est.mean = truth;
  est.P = default_initial_covariance();
  const MeasurementModel m = model_pos_att_gyro(1.0);
  const FullField field = [&](const FullState& s, double t) {
    return closed_loop_field(s, su.traj, t, su.model.gains, su.model.params);
  };
  const double dt = 0.01;
  const Mat18 Q = 0.01 * Mat18::Identity();
  for (int k = 0; k < 100; ++k) {
    const double t = k * dt;
    est = update(est, truth, m).estimate;
    truth = rk4_step(truth, field, t, dt);
    est = predict(est, t, dt, Q, su.model);
    ASSERT_LT(difference(truth, est.mean).norm(), 1e-8) << "step " << k;
    ASSERT_EQ(est.P, est.P.transpose());
    ASSERT_GE(min_eigenvalue(est.P), -1e-10);
  }
}

TEST(Predict, ProcessNoiseIsScaledByTheStep) {
  TwinSetup su;
  Estimate est;
  est.P = Mat18::Identity();
  const Mat18 Q = 0.5 * Mat18::Identity();
  const double dt = 0.01;
  const Mat18 A = system_jacobian(est.mean, 0.0, su.model);
  const Mat18 Phi = Mat18::Identity() + A * dt;
  const Mat18 expected = Phi * est.P * Phi.transpose() + Q * dt;
  const Estimate out = predict(est, 0.0, dt, Q, su.model);
  EXPECT_LT((out.P - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Predict, AnalyticAndDifferencedJacobiansAgree) {
  TwinSetup su;
  std::mt19937_64 rng(75);
  Estimate est;
  est.mean.x = su.traj.sample(1.0).x + random_vec(rng, 0.1);
  est.mean.v = su.traj.sample(1.0).v + random_vec(rng, 0.1);
  est.P = random_spd(rng);
  FilterModel fd = su.model;
  fd.options.jacobian = JacobianSource::FiniteDifference;
  const Mat18 Q = 0.01 * Mat18::Identity();
  const Estimate a = predict(est, 1.0, 0.01, Q, su.model);
  const Estimate b = predict(est, 1.0, 0.01, Q, fd);
  EXPECT_LT((a.P - b.P).norm(), 1e-5 * b.P.norm());
  EXPECT_LT(difference(a.mean, b.mean).norm(), 1e-15);
}

TEST(Predict, HeldInputPropagatesMeanWithTheGivenInput) {
  TwinSetup su;
  Estimate est;
  est.mean.x = su.traj.sample(0.0).x;
  est.mean.v = su.traj.sample(0.0).v;
  const ControlInput u{su.model.params.mass * su.model.params.gravity, Vec3::Zero()};
  const FullField field = [&](const FullState& s, double t) {
    return held_input_field(s, u, su.traj, t, su.model.gains, su.model.params);
  };
  const FullState expected = rk4_step(est.mean, field, 0.0, 0.01);
  for (auto kind : {FilterOptions::HeldJacobian::ClosedLoop, FilterOptions::HeldJacobian::HeldInput}) {
    FilterModel m = su.model;
    m.options.held_jacobian = kind;
    const Estimate out = predict_held(est, u, 0.0, 0.01, Mat18::Zero(), m);
    EXPECT_LT(difference(expected, out.mean).norm(), 1e-15);
    EXPECT_EQ(out.P, out.P.transpose());
  }
}

}  // namespace
