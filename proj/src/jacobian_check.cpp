#include "se3ekf/jacobian_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "se3ekf/config.hpp"
#include "se3ekf/errors.hpp"

namespace se3ekf {

double relative_error(const MatX& candidate, const MatX& reference) {
  const double diff = (candidate - reference).norm();
  if (diff == 0.0) return 0.0;
  const double ref = reference.norm();
  if (ref == 0.0) return std::numeric_limits<double>::infinity();
  return diff / ref;
}

double JacobianComparison::max_block_rel() const {
  double m = 0.0;
  for (const auto& row : rel) {
    for (double v : row) m = std::max(m, v);
  }
  return m;
}

JacobianComparison compare_jacobians(const FullState& s, const Trajectory& traj, double t,
                                     const Gains& g, const QuadrotorParams& p,
                                     const LinearizationOptions& opt, double fd_step) {
  JacobianComparison c;
  c.analytic = assemble_A_L(s, traj, t, g, p, opt).matrix();
  const FullField field = [&](const FullState& q, double tq) {
    return closed_loop_field(q, traj, tq, g, p, opt.controller);
  };
  c.numeric = fd_jacobian(field, s, t, fd_step);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      c.rel[i][j] = relative_error(c.analytic.block<3, 3>(3 * i, 3 * j),
                                   c.numeric.block<3, 3>(3 * i, 3 * j));
    }
  }
  c.full_rel = relative_error(c.analytic, c.numeric);
  return c;
}

std::string block_name(int row, int col) {
  return "A(" + std::to_string(row) + "," + std::to_string(col) + ")";
}

bool is_tight_block(int row, int /*col*/) { return row == 1 || row == 2 || row == 3 || row == 5; }

SweepResult jacobian_sweep(const ScenarioConfig& c, const SweepOptions& opt) {
  if (opt.states <= 0) throw std::invalid_argument("jacobian_sweep: states must be positive");
  const std::unique_ptr<Trajectory> traj = c.trajectory.build();
  LinearizationOptions lin = c.filter.linearization;
  lin.controller = c.controller;

  // Reference trajectory: true-state feedback from the configured initial state.
  const FullField field = [&](const FullState& s, double t) {
    return closed_loop_field(s, *traj, t, c.gains, c.params, c.controller);
  };
  const long steps = std::lround(c.duration / c.dt);
  const long stride = std::max<long>(1, steps / opt.states);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, opt.perturbation);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  SweepResult r;
  FullState s = c.initial_truth;
  int id = 0;
  for (long k = 0; k <= steps && id < opt.states; ++k) {
    const double t = static_cast<double>(k) * c.dt;
    if (k % stride == 0) {
      FullState probe = s;
      if (coin(rng) < opt.perturbed_fraction) {
        Vec18 d;
        for (int i = 0; i < kReducedDim; ++i) d(i) = normal(rng);
        probe = retract(s, d);
      }
      const int state_id = id++;
      const bool near_saturation =
          ((probe.ei.cwiseAbs().array() - c.gains.sigma).abs() < opt.saturation_margin).any();
      if (near_saturation) {
        ++r.states_skipped;
      } else {
        try {
          const JacobianComparison cmp =
              compare_jacobians(probe, *traj, t, c.gains, c.params, lin, opt.fd_step);
          ++r.states_checked;
          r.max_full_rel = std::max(r.max_full_rel, cmp.full_rel);
          if (!(cmp.full_rel <= opt.full_tolerance)) {
            r.full_ok = false;
            r.deviations.push_back({"full", state_id, t, cmp.full_rel});
          }
          for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
              const double e = cmp.rel[i][j];
              r.max_rel[i][j] = std::max(r.max_rel[i][j], e);
              const bool tight = is_tight_block(i + 1, j + 1);
              const double tol = tight ? opt.tight_tolerance : opt.block_tolerance;
              if (!(e <= tol)) {
                if (tight) r.tight_ok = false;
                r.deviations.push_back({block_name(i + 1, j + 1), state_id, t, e});
              }
            }
          }
        } catch (const DegenerateThrust&) {
          ++r.states_skipped;
        } catch (const HeadingSingularity&) {
          ++r.states_skipped;
        }
      }
    }
    if (k < steps) s = rk4_step(s, field, t, c.dt);
  }
  return r;
}

void write_deviation_report(const SweepResult& r, std::ostream& out) {
  out << "block,state_id,t,rel_error\n";
  for (const BlockDeviation& d : r.deviations) {
    out << d.block << ',' << d.state_id << ',' << format_double(d.t) << ','
        << format_double(d.rel_error) << '\n';
  }
}

}  // namespace se3ekf
