#pragma once

#include <functional>
#include <string>
#include <vector>

#include "se3ekf/controller.hpp"
#include "se3ekf/dynamics.hpp"
#include "se3ekf/state.hpp"
#include "se3ekf/trajectory.hpp"

namespace se3ekf {

struct LinearizationOptions {
  ControllerOptions controller;
  /// Central-difference step (s) for the time derivatives of the B-blocks
  /// along the closed-loop flow.
  double rate_step = 1e-4;
};

/// 18×18 closed-loop Jacobian in the reduced coordinates
/// (δx, δv, η, δΩ, δe_i, δe_I). Block indices are 1-based, matching m_ij.
class LinearizedSystem {
 public:
  LinearizedSystem() : A_(Mat18::Zero()) {}
  explicit LinearizedSystem(const Mat18& A) : A_(A) {}

  const Mat18& matrix() const { return A_; }
  Mat3 block(int row, int col) const { return A_.block<3, 3>(3 * (row - 1), 3 * (col - 1)); }
  void set_block(int row, int col, const Mat3& m) { A_.block<3, 3>(3 * (row - 1), 3 * (col - 1)) = m; }

  Mat3 m21() const { return block(2, 1); }
  Mat3 m22() const { return block(2, 2); }
  Mat3 m23() const { return block(2, 3); }
  Mat3 m24() const { return block(2, 5); }
  Mat3 m41() const { return block(4, 1); }
  Mat3 m42() const { return block(4, 2); }
  Mat3 m43() const { return block(4, 3); }
  Mat3 m44() const { return block(4, 4); }
  Mat3 m45() const { return block(4, 5); }
  Mat3 m61() const { return block(6, 1); }
  Mat3 m62() const { return block(6, 2); }
  Mat3 m63() const { return block(6, 3); }
  Mat3 m64() const { return block(6, 4); }
  Mat3 m65() const { return block(6, 5); }

 private:
  Mat18 A_;
};

/// χ̇ = f(χ, u(χ)) with the control recomputed from the given state.
FullTangent closed_loop_field(const FullState& s, const Trajectory& traj, double t,
                              const Gains& g, const QuadrotorParams& p,
                              const ControllerOptions& opt = {});

/// Analytic closed-loop Jacobian assembled block by block.
/// Throws DegenerateThrust / HeadingSingularity like the controller.
LinearizedSystem assemble_A_L(const FullState& s, const Trajectory& traj, double t,
                              const Gains& g, const QuadrotorParams& p,
                              const LinearizationOptions& opt = {});

/// Central-difference Jacobian of a FullState vector field in reduced
/// coordinates. Column j perturbs s ⊕ ±h e_j; the attitude rows are the rate
/// of the relative attitude between the perturbed and base states,
/// vee(R₀ᵀṘ± − Ω̂₀R₀ᵀR±), differenced.
Mat18 fd_jacobian(const FullField& field, const FullState& s, double t, double h = 1e-6);

/// Central-difference Jacobian of a plain vector field.
MatX fd_jacobian(const std::function<VecX(const VecX&)>& field, const VecX& x, double h = 1e-6);

}  // namespace se3ekf
