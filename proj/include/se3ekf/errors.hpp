#pragma once

#include <stdexcept>
#include <string>

namespace se3ekf {

/// ‖A‖ fell below the thrust guard; the computed thrust direction is undefined.
class DegenerateThrust : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The desired heading b1d is (nearly) parallel to the computed thrust axis.
class HeadingSingularity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Logarithm requested for a rotation whose angle is too close to pi.
class NearSingularRotation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular innovation covariance, singular P in NEES, non-finite values.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace se3ekf
