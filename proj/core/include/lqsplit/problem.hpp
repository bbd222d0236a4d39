#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "lqsplit/matfun.hpp"

namespace lqsplit {

/// A matrix-valued coefficient t -> M(t) with fixed dimensions.
///
/// Evaluators must be pure functions of t. The `constant` flag lets solvers
/// take the autonomous code paths (closed-form backward pass, cached
/// exponentials); it is checked on sample points by validate().
class TimeMatrix {
 public:
  using Evaluator = std::function<Matrix(double)>;

  TimeMatrix() = default;
  TimeMatrix(Evaluator evaluator, Index rows, Index cols, bool constant = false);

  static TimeMatrix constant(Matrix value);

  /// Evaluates at t. Throws DimensionError on a shape mismatch and
  /// InputError on non-finite output.
  Matrix operator()(double t) const;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool is_constant() const { return constant_; }
  bool empty() const { return !evaluator_; }

 private:
  Evaluator evaluator_;
  Index rows_ = 0;
  Index cols_ = 0;
  bool constant_ = false;
};

/// Data of the finite-horizon LQ problem
///   x' = A x + B u,  J = x(T)^T Q_T x(T) + int x^T Q x + u^T R u dt.
struct LQProblem {
  TimeMatrix A;  // n x n
  TimeMatrix B;  // n x r
  TimeMatrix Q;  // n x n, symmetric PSD
  TimeMatrix R;  // r x r, symmetric positive definite
  Matrix QT;     // n x n, symmetric PSD
  Vector x0;
  double t0 = 0.0;
  double T = 1.0;

  Index state_dim() const { return A.rows(); }
  Index input_dim() const { return B.cols(); }
  bool autonomous() const {
    return A.is_constant() && B.is_constant() && Q.is_constant() && R.is_constant();
  }
};

/// Checks shapes, t0 < T, symmetry/definiteness of Q, R, Q_T and the
/// constancy flags at the given nodes. Throws InputError/DimensionError.
void validate(const LQProblem& prob, std::span<const double> nodes);

/// validate() on nine equally spaced nodes of [t0, T].
void validate(const LQProblem& prob);

/// S(t) = B R^-1 B^T, symmetrized.
Matrix s_matrix(const LQProblem& prob, double t);

/// K(t) = [[A, -S], [-Q, -A^T]].
Matrix hamiltonian_matrix(const LQProblem& prob, double t);

/// A(t) - S(t) P.
Matrix closed_loop_matrix(const LQProblem& prob, double t, const Matrix& P);

/// Coefficients of a coupled Riccati system at one instant, for N players
/// sharing the state matrix A.
struct Coefficients {
  Matrix A;
  std::vector<Matrix> S;         // B_i R_ii^-1 B_i^T
  std::vector<Matrix> Q;         // Q_i
  std::vector<Matrix> feedback;  // R_ii^-1 B_i^T, so u_i = -feedback_i P_i x
};

/// The linearized coupled system shared by LQ problems (one player) and
/// non-zero-sum games:
///
///   [U; V_1; ...; V_N]' = K(t) [U; V_1; ...; V_N],
///   x' = (A - sum_i S_i V_i U^-1) x,
///
/// with K = [[A, -S_1 ... -S_N], [-Q_1; ...; -Q_N, -blockdiag(A^T)]] and
/// terminal value [I; Q_1T; ...; Q_NT]. The stacked matrix is called `v`
/// throughout and has (N+1)n rows and n columns.
class CoupledSystem {
 public:
  using Evaluator = std::function<Coefficients(double)>;

  CoupledSystem(Evaluator evaluator, Index state_dim, std::size_t players, bool autonomous,
                std::vector<Matrix> terminal_weights, Vector x0, double t0, double T);

  Coefficients coefficients(double t) const;
  Matrix coefficient_matrix(double t) const;
  Matrix terminal_condition() const;

  Index state_dim() const { return n_; }
  std::size_t players() const { return players_; }
  Index stacked_rows() const { return static_cast<Index>(players_ + 1) * n_; }
  bool autonomous() const { return autonomous_; }
  const std::vector<Matrix>& terminal_weights() const { return terminal_; }
  const Vector& x0() const { return x0_; }
  double t0() const { return t0_; }
  double T() const { return T_; }

  /// Raw gains P_i = V_i U^-1 (not symmetrized).
  std::vector<Matrix> gains(const Matrix& v) const;

  /// A - sum_i S_i V_i U^-1.
  Matrix closed_loop(const Coefficients& c, const Matrix& v) const;

  /// u_i = -R_ii^-1 B_i^T V_i U^-1 x for every player.
  std::vector<Vector> controls(const Coefficients& c, const Matrix& v, const Vector& x) const;

  static Matrix assemble(const Coefficients& c);

 private:
  Evaluator evaluator_;
  std::shared_ptr<const Coefficients> frozen_;
  Index n_;
  std::size_t players_;
  bool autonomous_;
  std::vector<Matrix> terminal_;
  Vector x0_;
  double t0_;
  double T_;
};

/// One-player coupled system of an LQ problem.
CoupledSystem to_coupled(const LQProblem& prob);

/// Per-player S and feedback blocks from B and R at time t; `who` names the
/// player in error messages.
void feedback_blocks(const Matrix& B, const Matrix& R, double t, std::string_view who, Matrix& S,
                     Matrix& feedback);

}  // namespace lqsplit
