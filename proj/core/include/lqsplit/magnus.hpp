#pragma once

#include <cstddef>

#include "lqsplit/problem.hpp"

namespace lqsplit::magnus {

enum class Direction { forward, backward };

/// y' = M(t) y for a square coefficient M.
struct LinearFlowProblem {
  TimeMatrix M;
  Direction direction = Direction::forward;
};

struct Counts {
  std::size_t samples = 0;       // evaluations of M(t)
  std::size_t exponentials = 0;  // calls to expm
};

/// One step of the fourth-order commutator-free Magnus method
///
///   y1 = exp(h/12 (-M0 + 4 M_1/2 + 3 M1)) exp(h/12 (3 M0 + 4 M_1/2 - M1)) y0,
///
/// with M_c = M(t + c h). `y` may be a vector or a block of columns; h may
/// be negative.
Matrix cf4_step(const LinearFlowProblem& prob, double t, double h, const Matrix& y,
                Counts* counts = nullptr);

/// Uniform-step CF4 from t0 to t1 (t1 < t0 integrates backward).
Matrix integrate(const LinearFlowProblem& prob, double t0, double t1, std::size_t steps,
                 const Matrix& y0, Counts* counts = nullptr);

}  // namespace lqsplit::magnus
