#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lqsplit/pipeline.hpp"
#include "lqsplit/problem.hpp"
#include "lqsplit/trajectory.hpp"

namespace lqsplit {

struct Player {
  TimeMatrix B;  // n x r_i
  TimeMatrix R;  // r_i x r_i, symmetric positive definite (R_ii)
  TimeMatrix Q;  // n x n, symmetric PSD
  Matrix QT;     // n x n, symmetric PSD
};

/// N-player linear-quadratic game
///   x' = A x + sum_i B_i u_i,
///   J_i = x(T)^T Q_iT x(T) + int x^T Q_i x + u_i^T R_ii u_i + sum_{j != i} u_j^T R_ij u_j.
struct GameProblem {
  TimeMatrix A;
  std::vector<Player> players;
  /// Cross weights R_ij for the zero-sum mode: cross[i][j] weights player
  /// j's control in player i's cost. Empty (or all entries empty) for the
  /// non-zero-sum game.
  std::vector<std::vector<TimeMatrix>> cross;
  Vector x0;
  double t0 = 0.0;
  double T = 1.0;

  Index state_dim() const { return A.rows(); }
  std::size_t player_count() const { return players.size(); }
  bool zero_sum() const;
  bool autonomous() const;
};

/// Snapshot of the stacked linear game flow [U; V_1; ...; V_N].
struct GameFlow {
  Matrix U;
  std::vector<Matrix> V;
  double t = 0.0;
};

/// Checks shapes and definiteness per player. A zero-sum game additionally
/// needs exactly two players with both cross weights R_12 and R_21.
void validate(const GameProblem& game);

/// [[A, -S_1 ... -S_N], [-Q_1; ...; -Q_N, -blockdiag(A^T)]] at t.
Matrix game_block_matrix(const GameProblem& game, double t);

/// Coupled linear system of a non-zero-sum game. Throws MisuseError for a
/// zero-sum game.
CoupledSystem to_coupled(const GameProblem& game);

GameFlow split_game_flow(const Matrix& v, Index state_dim, double t);

/// Backward pass (expm or extrapolated CF4) then forward splitting with
/// `opts`. Controls are sampled after every forward step.
Trajectory solve_game(const GameProblem& game, const SolveOptions& opts);

/// Right-hand sides of the two coupled zero-sum Riccati equations
///   P1' = -Q1 - A^T P1 - P1 A + P1 S1 P1 + P1 S2 P2 + P2 S22 P2,
///   P2' = -Q2 - A^T P2 - P2 A + P2 S2 P2 + P2 S1 P1 + P1 S11 P1,
/// with S_i = B_i R_ii^-1 B_i^T, S22 = B_2 R_12^-1 B_2^T and
/// S11 = B_1 R_21^-1 B_1^T.
std::pair<Matrix, Matrix> zero_sum_rhs(const GameProblem& game, double t, const Matrix& P1,
                                       const Matrix& P2);

struct ZeroSumOptions {
  /// Coarsest backward step count; the solve also runs 2k and 4k steps.
  std::size_t steps_backward = 32;
  /// Weights of the forward composition of the symmetric base map.
  std::vector<double> alphas;
  std::size_t steps_forward = 32;
};

/// Zero-sum two-player solve. Backward: a symmetric second-order map (exact
/// linear part, Taylor-4 quadratic part, coefficients frozen at the
/// midpoint) extrapolated over k, 2k and 4k steps. Forward: the same map
/// composed with `alphas` (triple jump when empty) together with a Strang
/// step for the state. Throws ConvergenceError when the step-halving
/// differences do not decrease.
Trajectory solve_zero_sum(const GameProblem& game, const ZeroSumOptions& opts);

}  // namespace lqsplit
