#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "se3ekf/linearization.hpp"
#include "se3ekf/scenario.hpp"

namespace se3ekf {

using BlockErrors = std::array<std::array<double, 6>, 6>;

struct JacobianComparison {
  Mat18 analytic;
  Mat18 numeric;
  BlockErrors rel{};  // ‖analytic − numeric‖_F / ‖numeric‖_F per 3×3 block
  double full_rel = 0.0;
  double max_block_rel() const;
};

/// Relative Frobenius error; zero when both sides agree exactly, infinite when
/// the reference is zero and the candidate is not.
double relative_error(const MatX& candidate, const MatX& reference);

JacobianComparison compare_jacobians(const FullState& s, const Trajectory& traj, double t,
                                     const Gains& g, const QuadrotorParams& p,
                                     const LinearizationOptions& opt = {}, double fd_step = 1e-6);

/// "A(i,j)" with 1-based block indices; the m_ij names used in the report.
std::string block_name(int row, int col);

/// Rows 1, 2, 3 and 5: kinematics, translational dynamics and the integrator
/// rows, all of which have short closed forms.
bool is_tight_block(int row, int col);

struct SweepOptions {
  int states = 120;
  double perturbed_fraction = 0.5;
  double perturbation = 0.1;   // standard deviation per reduced coordinate
  std::uint64_t seed = 7;
  double saturation_margin = 1e-3;  // skip states with |e_i,k| this close to σ
  double fd_step = 1e-6;
  double tight_tolerance = 1e-4;
  double block_tolerance = 1e-3;  // blocks above this are reported
  double full_tolerance = 1e-3;
};

struct BlockDeviation {
  std::string block;
  int state_id;
  double t;
  double rel_error;
};

struct SweepResult {
  int states_checked = 0;
  int states_skipped = 0;
  double max_full_rel = 0.0;
  BlockErrors max_rel{};
  std::vector<BlockDeviation> deviations;
  bool tight_ok = true;   // no tight-block deviation
  bool full_ok = true;    // every full-matrix error within tolerance
  bool passed() const { return tight_ok && full_ok; }
};

/// Samples states along the closed-loop trajectory of `c` (true-state
/// feedback, no noise), perturbs a fraction of them, and compares the
/// assembled Jacobian with finite differences at each.
SweepResult jacobian_sweep(const ScenarioConfig& c, const SweepOptions& opt = {});

/// CSV `block,state_id,t,rel_error`, one row per deviation, followed by nothing
/// else; an empty report is just the header.
void write_deviation_report(const SweepResult& r, std::ostream& out);

}  // namespace se3ekf
