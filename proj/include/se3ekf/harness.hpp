#pragma once

#include <string>
#include <vector>

#include "se3ekf/scenario.hpp"
#include "se3ekf/telemetry.hpp"

namespace se3ekf {

enum class RunStatus { Ok, ThresholdFailure, DegenerateAbort };

/// Process exit code for a status: 0, 1 or 2. Configuration and I/O errors
/// map to 3 in the CLI.
int exit_code(RunStatus s);

struct RunResult {
  RunStatus status = RunStatus::Ok;
  std::vector<TelemetryRecord> records;
  Metrics metrics;
  std::vector<ThresholdCheck> checks;
  std::vector<std::string> warnings;
  std::string diagnostic;  // set on a degenerate abort
  double initial_position_error = 0.0;  // ‖x̄(0) − x(0)‖ before the first update
  double initial_velocity_error = 0.0;
};

/// Closed-loop simulation with the filter in the loop. Each step:
/// measure the truth, update the filter, compute the control, advance the
/// truth, predict the filter. Telemetry holds the a-posteriori estimate at
/// each measurement time.
RunResult run(const ScenarioConfig& c);

}  // namespace se3ekf
