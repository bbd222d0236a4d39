#pragma once

#include <cstddef>

#include "lqsplit/problem.hpp"

namespace lqsplit {

/// Snapshot of the linearized Riccati flow y = [U; V] at time t. For games
/// V stacks the players' blocks V_1, ..., V_N.
struct RiccatiFlow {
  Matrix U;
  Matrix V;
  double t = 0.0;

  /// Reciprocal condition estimate of U.
  double rcond() const;
};

struct Gain {
  Matrix P;                      // symmetrized V U^-1
  double symmetry_defect = 0.0;  // ||V U^-1 - (V U^-1)^T||_inf before symmetrizing
};

struct BackwardResult {
  Matrix v;                     // stacked [U; V] at t0
  double error_estimate = 0.0;  // max-norm estimate, 0 for the closed-form path
  std::size_t steps = 0;        // CF4 steps of the finest solve, 0 for expm
};

namespace riccati {

/// [U0; V0] = expm((t0 - T) K) [I; Q_T] for constant coefficients.
RiccatiFlow backward_autonomous(const LQProblem& prob);

/// CF4 Magnus from T down to t0 on `steps` uniform steps.
RiccatiFlow backward_nonautonomous(const LQProblem& prob, std::size_t steps);

Matrix backward_autonomous(const CoupledSystem& sys);
Matrix backward_nonautonomous(const CoupledSystem& sys, std::size_t steps);

/// Backward pass to a target accuracy: expm for autonomous systems,
/// otherwise CF4 on k and 2k steps combined by one Richardson step, with k
/// doubled from `initial_steps` until the estimate is below `tolerance`.
BackwardResult backward_pass(const CoupledSystem& sys, double tolerance = 1e-12,
                             std::size_t initial_steps = 128);

/// P = V U^-1, symmetrized, with the raw symmetry defect.
Gain gain(const RiccatiFlow& flow);

/// u = -R^-1 B^T V U^-1 x at the flow's time.
Vector control(const LQProblem& prob, double t, const RiccatiFlow& flow, const Vector& x);

/// Splits a stacked [U; V] into a flow snapshot.
RiccatiFlow split_flow(const Matrix& v, Index state_dim, double t);

}  // namespace riccati
}  // namespace lqsplit
