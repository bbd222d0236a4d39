#include <random>

#include <gtest/gtest.h>

#include "lqsplit/errors.hpp"
#include "lqsplit/matfun.hpp"
#include "lqsplit/problem.hpp"
#include "support/oracles.hpp"

using lqsplit::Matrix;
using lqsplit::TimeMatrix;
using lqsplit::Vector;

namespace {

lqsplit::LQProblem small_problem() {
  lqsplit::LQProblem p;
  Matrix a(2, 2);
  a << 0, 1, -2, -0.5;
  p.A = TimeMatrix::constant(a);
  p.B = TimeMatrix::constant((Matrix(2, 1) << 0, 1).finished());
  p.Q = TimeMatrix::constant(Matrix::Identity(2, 2));
  p.R = TimeMatrix::constant(Matrix::Constant(1, 1, 0.5));
  p.QT = 0.1 * Matrix::Identity(2, 2);
  p.x0 = Vector::Ones(2);
  return p;
}

}  // namespace

TEST(TimeMatrix, ConstantAndEvaluated) {
  const auto c = TimeMatrix::constant(Matrix::Identity(2, 2));
  EXPECT_TRUE(c.is_constant());
  EXPECT_EQ(c(3.0), Matrix::Identity(2, 2));
  const TimeMatrix f([](double t) { return Matrix::Constant(1, 1, t * t); }, 1, 1);
  EXPECT_FALSE(f.is_constant());
  EXPECT_DOUBLE_EQ(f(3.0)(0, 0), 9.0);
}

TEST(LQProblem, ValidAcceptsAndReportsAutonomy) {
  const auto p = small_problem();
  EXPECT_NO_THROW(lqsplit::validate(p));
  EXPECT_TRUE(p.autonomous());
  EXPECT_EQ(p.state_dim(), 2);
  EXPECT_EQ(p.input_dim(), 1);
}

TEST(LQProblem, RejectsBadData) {
  auto p = small_problem();
  p.Q = TimeMatrix::constant((Matrix(2, 2) << 1, 0.5, 0, 1).finished());
  EXPECT_THROW(lqsplit::validate(p), lqsplit::InputError);

  p = small_problem();
  p.R = TimeMatrix::constant(Matrix::Constant(1, 1, -1.0));
  EXPECT_THROW(lqsplit::validate(p), lqsplit::InputError);

  p = small_problem();
  p.QT = -Matrix::Identity(2, 2);
  EXPECT_THROW(lqsplit::validate(p), lqsplit::InputError);

  p = small_problem();
  p.B = TimeMatrix::constant(Matrix::Ones(3, 1));
  EXPECT_THROW(lqsplit::validate(p), lqsplit::DimensionError);

  p = small_problem();
  p.x0 = Vector::Ones(3);
  EXPECT_THROW(lqsplit::validate(p), lqsplit::DimensionError);

  p = small_problem();
  p.T = p.t0;
  EXPECT_THROW(lqsplit::validate(p), lqsplit::InputError);
}

TEST(LQProblem, HamiltonianBlocks) {
  const auto p = small_problem();
  const Matrix k = lqsplit::hamiltonian_matrix(p, 0.0);
  const Matrix a = p.A(0.0);
  const Matrix s = lqsplit::s_matrix(p, 0.0);
  EXPECT_EQ(k.topLeftCorner(2, 2), a);
  EXPECT_EQ(k.topRightCorner(2, 2), -s);
  EXPECT_EQ(k.bottomLeftCorner(2, 2), -p.Q(0.0));
  EXPECT_EQ(k.bottomRightCorner(2, 2), Matrix(-a.transpose()));
  EXPECT_NEAR(s(1, 1), 2.0, 1e-15);
  EXPECT_LE(lqsplit::matfun::hamiltonian_defect(k), 1e-15);
}

TEST(LQProblem, ClosedLoopUsesMinusSP) {
  const auto p = small_problem();
  const Matrix P = Matrix::Identity(2, 2);
  EXPECT_EQ(lqsplit::closed_loop_matrix(p, 0.0, P), Matrix(p.A(0.0) - lqsplit::s_matrix(p, 0.0) * P));
}

TEST(CoupledSystem, TerminalConditionAndGains) {
  const auto p = small_problem();
  const auto sys = lqsplit::to_coupled(p);
  EXPECT_EQ(sys.players(), 1u);
  EXPECT_EQ(sys.stacked_rows(), 4);
  EXPECT_TRUE(sys.autonomous());
  const Matrix tc = sys.terminal_condition();
  EXPECT_EQ(tc.topRows(2), Matrix::Identity(2, 2));
  EXPECT_EQ(tc.bottomRows(2), p.QT);
  EXPECT_EQ(sys.coefficient_matrix(0.0), lqsplit::hamiltonian_matrix(p, 0.0));

  std::mt19937 rng(1);
  const Matrix u = oracle::random_matrix(rng, 2, 2) + 2 * Matrix::Identity(2, 2);
  const Matrix P = oracle::random_spd(rng, 2);
  Matrix v(4, 2);
  v << u, P * u;
  const auto gains = sys.gains(v);
  ASSERT_EQ(gains.size(), 1u);
  EXPECT_LE(oracle::max_abs(gains[0] - P), 1e-13);

  const auto c = sys.coefficients(0.0);
  const Vector x = Vector::Ones(2);
  const auto u_ctrl = sys.controls(c, v, x);
  EXPECT_LE((u_ctrl[0] - (-c.feedback[0] * P * x)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LE(oracle::max_abs(sys.closed_loop(c, v) - (c.A - c.S[0] * P)), 1e-13);
}
