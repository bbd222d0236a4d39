#pragma once

#include <cstddef>
#include <functional>
#include <utility>

#include "lqsplit/problem.hpp"

namespace lqsplit {

/// y' = f(t, y) on R^d with a call counter.
class FlatODE {
 public:
  using Rhs = std::function<Vector(double, const Vector&)>;

  FlatODE(Index dimension, Rhs rhs);

  /// Evaluates f and increments the counter. Throws DimensionError when the
  /// input or output length differs from the dimension.
  Vector operator()(double t, const Vector& y);

  Index dimension() const { return dim_; }
  std::size_t evaluations() const { return count_; }
  void reset_count() { count_ = 0; }

 private:
  Index dim_;
  Rhs rhs_;
  std::size_t count_ = 0;
};

/// Called with (t, y) at the start point and after every accepted step.
using Observer = std::function<void(double, const Vector&)>;

/// Classical RK4 step; exactly four right-hand-side calls.
Vector rk4_step(FlatODE& ode, double t, double h, const Vector& y);

/// Uniform-step RK4 from t0 to t1.
Vector rk4(FlatODE& ode, double t0, double t1, std::size_t steps, const Vector& y0,
           const Observer& observer = {});

struct AdaptiveResult {
  Vector y;
  std::size_t evaluations = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Dormand-Prince 5(4) with PI step-size control and dense-free stepping.
/// The error norm is the RMS of err_i / (abs_tol + rel_tol max(|y_i|, |y_new_i|)).
/// Throws ConvergenceError when the step falls below 1e-14 |t1 - t0|.
AdaptiveResult adaptive_solve(FlatODE& ode, double t0, double t1, const Vector& y0,
                              double abs_tol, double rel_tol, const Observer& observer = {});

/// Tolerances of ladder rung i: abs 10^-i, rel 10^(1-i).
std::pair<double, double> tolerance_ladder(int exponent);

/// The coupled Riccati-plus-state system as one flat vector field:
/// y = [vec(v); x] with v' = K(t) v, x' = (A - sum S_i V_i U^-1) x.
FlatODE coupled_flat_ode(const CoupledSystem& sys);

/// Column-major packing of (v, x) into the flat vector and back.
Vector pack_state(const Matrix& v, const Vector& x);
void unpack_state(const Vector& y, Index rows, Index cols, Matrix& v, Vector& x);

}  // namespace lqsplit
