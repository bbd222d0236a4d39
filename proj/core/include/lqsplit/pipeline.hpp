#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "lqsplit/problem.hpp"
#include "lqsplit/trajectory.hpp"

namespace lqsplit {

enum class Method { sp1, sp2, sp4, sp6, s2c4, ni42, ni84, rk4, dopri };

/// Case-insensitive; throws ConfigError listing the valid names.
Method parse_method(std::string_view name);
std::string_view method_name(Method m);
bool is_splitting(Method m);

struct SolveOptions {
  Method method = Method::sp4;
  /// Uniform forward steps for every method except dopri.
  std::size_t steps = 32;
  /// dopri tolerances: abs 10^-i, rel 10^(1-i).
  int tol_exponent = 8;
  /// Constant part of A for ni42/ni84.
  std::optional<Matrix> dominant;
  double backward_tolerance = 1e-12;
};

/// Forward pass from a known stacked flow v0 = [U0; V0] at t0.
Trajectory solve_forward(const CoupledSystem& sys, const Matrix& v0, const SolveOptions& opts);

/// Backward pass followed by the forward pass. The backward cost is reported
/// separately and not included in the evaluation count.
Trajectory solve(const CoupledSystem& sys, const SolveOptions& opts);
Trajectory solve(const LQProblem& prob, const SolveOptions& opts);

}  // namespace lqsplit
