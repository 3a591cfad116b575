// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "se3ekf/controller.hpp"
#include "se3ekf/estimator.hpp"
#include "se3ekf/geom.hpp"
#include "se3ekf/harness.hpp"
#include "se3ekf/jacobian_check.hpp"
#include "se3ekf/linearization.hpp"
#include "se3ekf/scenario.hpp"
#include "se3ekf/telemetry.hpp"

using namespace se3ekf;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Vec3 gaussian(std::mt19937_64& rng, double s) {
  std::normal_distribution<double> n(0.0, s);
  return Vec3(n(rng), n(rng), n(rng));
}

Rotation uniform_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return Rotation::unchecked(q.normalized().toRotationMatrix());
}

// 1. Analytic closed-loop Jacobian against the retraction-aware FD oracle.
Outcome jacobian_oracle() {
  const SweepResult r = jacobian_sweep(scenario_example1(), SweepOptions{});
  bool tight_report_empty = true;
  for (const BlockDeviation& d : r.deviations) {
    const int row = d.block[2] - '0', col = d.block[4] - '0';
    if (is_tight_block(row, col)) tight_report_empty = false;
  }
  const bool ok = r.states_checked >= 100 && r.tight_ok && r.full_ok && tight_report_empty;
  double worst_tight = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (is_tight_block(i + 1, j + 1)) worst_tight = std::max(worst_tight, r.max_rel[i][j]);
  return {ok, std::to_string(r.states_checked) + " states, worst tight block " + fmt("%.2e", worst_tight) +
                  ", worst full " + fmt("%.2e", r.max_full_rel) + ", " +
                  std::to_string(r.deviations.size()) + " reported deviations"};
}

// 2. Geometry suite.
Outcome geometry_suite() {
  std::mt19937_64 rng(2024);
  bool ok = true;
  double worst_vee = 0.0, worst_log = 0.0, worst_er = 0.0, worst_orth = 0.0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = gaussian(rng, 5.0);
    worst_vee = std::max(worst_vee, (vee(hat(v)) - v).norm());
    Vec3 eta;
    do eta = Vec3(u(rng), u(rng), u(rng)); while (eta.norm() > 1.0);
    eta *= 3.0;
    worst_log = std::max(worst_log, (log_so3(exp_so3(eta)) - eta).norm());
  }
  for (int i = 0; i < 10000; ++i) {
    const AttitudeError e = attitude_error(uniform_rotation(rng), uniform_rotation(rng));
    worst_er = std::max(worst_er, std::abs(e.e_R.squaredNorm() - e.psi * (2.0 - e.psi)));
  }
  QuadrotorParams p;
  QuadrotorState s;
  s.W = Vec3(1.0, -2.0, 0.5);
  const ControlInput in{7.0, Vec3(1e-3, -2e-3, 5e-4)};
  for (int k = 0; k < 10000; ++k) {
    s = rk4_step(s, in, p, 0.01);
    worst_orth = std::max(worst_orth, s.R.orthogonality_error());
  }
  ok = worst_vee == 0.0 && worst_log < 1e-9 && worst_er < 1e-12 && worst_orth <= 1e-9;
  return {ok, "vee∘hat " + fmt("%.1e", worst_vee) + ", log∘exp " + fmt("%.1e", worst_log) +
                  ", |e_R|^2-psi(2-psi) " + fmt("%.1e", worst_er) + ", RtR-I " + fmt("%.1e", worst_orth)};
}

// 3. Hover equilibrium of the closed loop.
Outcome controller_equilibrium() {
  const HoverTrajectory hover(Vec3(0, 0, -1));
  Gains g;
  QuadrotorParams p;  // m = 0.755, g = 9.81, no disturbances
  FullState s;
  s.x = hover.position();
  const ControlSolution c = solve_control(s, hover, 0.0, g, p);
  const FullTangent d = closed_loop_field(s, hover, 0.0, g, p);
  const double worst = std::max({d.x_dot.cwiseAbs().maxCoeff(), d.v_dot.cwiseAbs().maxCoeff(),
                                 d.R_dot.cwiseAbs().maxCoeff(), d.W_dot.cwiseAbs().maxCoeff(),
                                 d.ei_dot.cwiseAbs().maxCoeff(), d.eI_dot.cwiseAbs().maxCoeff()});
  const double ferr = std::abs(c.u.thrust - 7.40655);
  const bool ok = ferr <= 1e-9 && c.u.moment.norm() == 0.0 && worst <= 1e-12;
  return {ok, "f=" + fmt("%.10f", c.u.thrust) + " |M|=" + fmt("%.1e", c.u.moment.norm()) +
                  " max|field|=" + fmt("%.1e", worst)};
}

ScenarioConfig noiseless(ScenarioConfig c) {
  c.measurement_sample_scale = 0.0;
  c.truth_process_noise = 0.0;
  c.thresholds = Thresholds{};
  return c;
}

// 4. Example-1 tracking with true-state feedback and the listed disturbances.
Outcome tracking() {
  ScenarioConfig c = noiseless(scenario_example1());
  c.feedback = FeedbackMode::Truth;
  const RunResult r = run(c);
  double worst = 0.0;
  for (const TelemetryRecord& rec : r.records)
    if (rec.t >= 5.0 - 1e-12) worst = std::max(worst, (rec.truth.x - rec.des_x).norm());
  const bool ok = r.status != RunStatus::DegenerateAbort && r.records.back().t >= 10.0 - 1e-9 && worst < 1e-2;
  return {ok, "max |e_x| for t>=5 s = " + fmt("%.4g", worst) + " m"};
}

// 5. Filter limits and covariance health in every bundled scenario.
Outcome ekf_sanity() {
  std::mt19937_64 rng(5);
  Estimate prior;
  prior.mean.x = Vec3(0.3, -0.2, 1.0);
  prior.mean.R = exp_so3(Vec3(0.2, 0.1, -0.3));
  prior.P = default_initial_covariance();
  Vec18 delta;
  for (int i = 0; i < 18; ++i) delta(i) = gaussian(rng, 0.3)(0);
  const FullState z = retract(prior.mean, delta);
  const UpdateResult exact = update(prior, z, model_full(1e-9));
  const double exact_err = difference(z, exact.estimate.mean).norm();
  const UpdateResult vague = update(prior, z, model_full(1e9));
  const double vague_move = difference(prior.mean, vague.estimate.mean).norm() / vague.innovation.norm();

  double min_eig = std::numeric_limits<double>::infinity();
  std::string aborted;
  for (const ScenarioInfo& s : scenario_registry()) {
    const RunResult r = run(s.make());
    for (const TelemetryRecord& rec : r.records) min_eig = std::min(min_eig, rec.P_min_eig);
    if (r.status == RunStatus::DegenerateAbort) aborted += " " + s.name;
  }
  const bool ok = exact_err < 1e-6 && vague_move < 1e-6 && min_eig >= -1e-10;
  std::string detail = "R=1e-9 error " + fmt("%.1e", exact_err) + ", R=1e9 relative move " +
                       fmt("%.1e", vague_move) + ", min eig(P) over scenarios " + fmt("%.3e", min_eig);
  if (!aborted.empty()) detail += " (degenerate abort in" + aborted + "; steps before the abort checked)";
  return {ok, detail};
}

// 6. Example-1 reproduction over 10 seeds.
Outcome example1_reproduction() {
  int converged = 0, ratio_ok = 0;
  double ratio_sum = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ScenarioConfig c = scenario_example1();
    c.seed = seed;
    const RunResult r = run(c);
    const Metrics& m = r.metrics;
    const bool full = r.status != RunStatus::DegenerateAbort;
    const bool conv = full && std::isfinite(m.convergence_time) && m.convergence_time <= 2.0;
    const double ratio = full ? m.fd_velocity_rmse / m.rmse_velocity : 0.0;
    converged += conv;
    ratio_ok += (std::isfinite(ratio) && ratio >= 0.8 * 3.0);
    ratio_sum += std::isfinite(ratio) ? ratio : 0.0;
    if (!conv) {
      per_seed += " " + std::to_string(seed) +
                  (!full ? std::string("(degenerate abort)")
                   : std::isfinite(m.convergence_time) ? "(" + fmt("%.2f s", m.convergence_time) + ")"
                                                        : std::string("(never)"));
    }
  }
  const double mean_ratio = ratio_sum / 10.0;
  const bool ok = converged == 10 && ratio_ok == 10 && mean_ratio >= 3.0;
  std::string detail = std::to_string(converged) + "/10 seeds below 0.2 m within 2 s, " +
                       std::to_string(ratio_ok) + "/10 with RMSE ratio >= 2.4, mean ratio " + fmt("%.3g", mean_ratio);
  if (!per_seed.empty()) detail += "; failing seeds:" + per_seed;
  return {ok, detail};
}

// 7. Example-2 GPS-denied reproduction over 10 seeds.
Outcome example2_reproduction() {
  int ok_seeds = 0;
  double worst_x = 0.0, worst_v = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ScenarioConfig c = scenario_example2();
    c.seed = seed;
    const RunResult r = run(c);
    const bool full = r.status != RunStatus::DegenerateAbort;
    const double mx = full ? r.metrics.max_position_error : INFINITY;
    const double mv = full ? r.metrics.max_velocity_error : INFINITY;
    worst_x = std::max(worst_x, mx);
    worst_v = std::max(worst_v, mv);
    ok_seeds += (mx < 1.0 && mv < 0.5);
  }
  return {ok_seeds == 10, std::to_string(ok_seeds) + "/10 seeds within bounds; worst max |x-x_bar| " +
                              fmt("%.3g", worst_x) + " m, worst max |v-v_bar| " + fmt("%.3g", worst_v) + " m/s"};
}

// 8. Zero-noise twin with exact initialization.
Outcome zero_noise_twin() {
  ScenarioConfig c = noiseless(scenario_example1());
  c.initial_estimate = c.initial_truth;
  const RunResult r = run(c);
  double worst = 0.0;
  for (const TelemetryRecord& rec : r.records) {
    worst = std::max({worst, (rec.est.x - rec.truth.x).norm(), (rec.est.v - rec.truth.v).norm(),
                      (rec.est.R.matrix() - rec.truth.R.matrix()).norm(), (rec.est.W - rec.truth.W).norm()});
  }
  const bool ok = r.status == RunStatus::Ok && r.records.back().t >= 10.0 - 1e-9 && worst < 1e-6;
  return {ok, "max estimator-truth divergence over 10 s = " + fmt("%.2e", worst)};
}

// 9. Byte-identical telemetry for identical config and seed.
Outcome determinism() {
  bool ok = true;
  for (const ScenarioInfo& s : scenario_registry()) {
    ScenarioConfig c = s.make();
    c.seed = 77;
    std::ostringstream a, b;
    write_csv(run(c).records, a);
    write_csv(run(c).records, b);
    ok = ok && a.str() == b.str() && !a.str().empty();
  }
  return {ok, "all bundled scenarios rerun with seed 77"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 jacobian-oracle", jacobian_oracle},
      {"2 geometry-suite", geometry_suite},
      {"3 controller-equilibrium", controller_equilibrium},
      {"4 tracking", tracking},
      {"5 ekf-sanity", ekf_sanity},
      {"6 example1-reproduction", example1_reproduction},
      {"7 example2-gps-denied", example2_reproduction},
      {"8 zero-noise-twin", zero_noise_twin},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.passed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
