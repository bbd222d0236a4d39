#pragma once

#include <cstddef>
#include <vector>

#include "lqsplit/problem.hpp"

namespace lqsplit {

struct Sample {
  double t = 0.0;
  Vector x;
  std::vector<Matrix> gains;     // symmetrized P_i
  std::vector<Vector> controls;  // u_i
  double min_eigenvalue = 0.0;   // min_i lambda_min(P_i)
  double symmetry_defect = 0.0;  // max_i ||P_i - P_i^T||_inf before symmetrizing
};

/// Time-indexed output of a forward solve plus cost accounting.
struct Trajectory {
  std::vector<Sample> samples;
  /// Native cost in the unit of the method family, e.g. fresh state
  /// exponentials for splitting schemes or right-hand-side calls for RK.
  std::size_t evaluations = 0;
  std::size_t backward_steps = 0;
  double backward_error = 0.0;

  const Sample& initial() const;
  const Sample& final() const;
  double min_eigenvalue() const;
  double max_symmetry_defect() const;
  /// max_i ||P_i(T) - Q_iT||_inf
  double terminal_defect(const std::vector<Matrix>& terminal_weights) const;
};

/// Builds the sample of a stacked flow including its structural diagnostics.
Sample make_sample(const CoupledSystem& sys, double t, const Matrix& v, const Vector& x);

/// Sample from explicit gains (used by the zero-sum solver).
Sample make_sample(double t, const Vector& x, const std::vector<Matrix>& raw_gains,
                   const std::vector<Matrix>& feedback);

}  // namespace lqsplit
