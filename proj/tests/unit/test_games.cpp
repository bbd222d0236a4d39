#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lqsplit/errors.hpp"
#include "lqsplit/games.hpp"
#include "lqsplit/matfun.hpp"
#include "lqsplit/pipeline.hpp"
#include "support/oracles.hpp"

using lqsplit::Matrix;
using lqsplit::TimeMatrix;
using lqsplit::Vector;

namespace {

TimeMatrix c1(double v) { return TimeMatrix::constant(Matrix::Constant(1, 1, v)); }

// Two players on a two-dimensional state with time-varying A.
lqsplit::GameProblem nash_game(std::mt19937& rng) {
  lqsplit::GameProblem g;
  const Matrix a0 = oracle::random_matrix(rng, 2, 2, 0.5);
  g.A = TimeMatrix([a0](double t) { return Matrix(a0 + std::sin(t) * Matrix::Identity(2, 2)); }, 2, 2);
  for (int i = 0; i < 2; ++i) {
    lqsplit::Player p;
    p.B = TimeMatrix::constant(oracle::random_matrix(rng, 2, 1));
    p.R = TimeMatrix::constant(oracle::random_spd(rng, 1));
    p.Q = TimeMatrix::constant(oracle::random_spd(rng, 2));
    p.QT = 0.5 * Matrix::Identity(2, 2);
    g.players.push_back(p);
  }
  g.x0 = (Vector(2) << 1, -1).finished();
  g.T = 1.0;
  return g;
}

lqsplit::GameProblem zero_sum_scalar() {
  lqsplit::GameProblem g;
  g.A = c1(-1);
  g.players = {{c1(1), c1(1), c1(1), Matrix::Constant(1, 1, 0.5)},
               {c1(0.8), c1(2), c1(0.5), Matrix::Constant(1, 1, 0.2)}};
  g.cross = {{{}, c1(3)}, {c1(4), {}}};
  g.x0 = Vector::Constant(1, 1.0);
  return g;
}

}  // namespace

TEST(Games, NashSolutionMatchesCoupledRiccatiOracle) {
  std::mt19937 rng(17);
  const auto g = nash_game(rng);
  std::vector<Matrix> S;
  for (const auto& p : g.players) {
    const Matrix b = p.B(0);
    S.push_back(b * p.R(0).inverse() * b.transpose());
  }
  // y = [P1; P2; x padded to a column block]
  auto field = [&](double t, const Matrix& y) {
    const Matrix a = g.A(t);
    const Matrix P1 = y.block(0, 0, 2, 2), P2 = y.block(2, 0, 2, 2);
    const Matrix sp = S[0] * P1 + S[1] * P2;
    Matrix f = Matrix::Zero(6, 2);
    f.block(0, 0, 2, 2) = -g.players[0].Q(t) - a.transpose() * P1 - P1 * a + P1 * sp;
    f.block(2, 0, 2, 2) = -g.players[1].Q(t) - a.transpose() * P2 - P2 * a + P2 * sp;
    f.block(4, 0, 2, 1) = (a - sp) * y.block(4, 0, 2, 1);
    return f;
  };
  Matrix yT = Matrix::Zero(6, 2);
  yT.block(0, 0, 2, 2) = g.players[0].QT;
  yT.block(2, 0, 2, 2) = g.players[1].QT;
  Matrix y0 = oracle::rk4(field, 1, 0, 20000, yT);
  y0.block(4, 0, 2, 1) = g.x0;
  const Matrix y1 = oracle::rk4(field, 0, 1, 20000, y0);

  lqsplit::SolveOptions o;
  o.method = lqsplit::Method::sp4;
  o.steps = 128;
  const auto traj = lqsplit::solve_game(g, o);
  EXPECT_LE((traj.final().x - y1.block(4, 0, 2, 1)).cwiseAbs().maxCoeff(), 1e-9);
  // With a vector state the Nash gains V_i U^-1 need not be symmetric; the
  // samples carry the symmetric part and the measured asymmetry.
  double asym = 0;
  for (int i = 0; i < 2; ++i) {
    const Matrix P = y0.block(2 * i, 0, 2, 2);
    asym = std::max(asym, (P - P.transpose()).cwiseAbs().rowwise().sum().maxCoeff());
    EXPECT_LE(oracle::max_abs(traj.initial().gains[static_cast<std::size_t>(i)] -
                              (P + P.transpose()) / 2),
              1e-9);
  }
  EXPECT_NEAR(traj.initial().symmetry_defect, asym, 1e-9);
  ASSERT_EQ(traj.samples.front().controls.size(), 2u);
}

TEST(Games, BlockMatrixLayout) {
  std::mt19937 rng(3);
  const auto g = nash_game(rng);
  const Matrix k = lqsplit::game_block_matrix(g, 0.5);
  ASSERT_EQ(k.rows(), 6);
  const Matrix a = g.A(0.5);
  EXPECT_EQ(k.block(0, 0, 2, 2), a);
  EXPECT_EQ(k.block(2, 2, 2, 2), Matrix(-a.transpose()));
  EXPECT_EQ(k.block(4, 4, 2, 2), Matrix(-a.transpose()));
  EXPECT_EQ(k.block(2, 4, 2, 2), Matrix::Zero(2, 2));
  EXPECT_EQ(k.block(4, 0, 2, 2), Matrix(-g.players[1].Q(0.5)));
  const auto sys = lqsplit::to_coupled(g);
  EXPECT_EQ(sys.coefficient_matrix(0.5), k);
}

TEST(Games, SplitGameFlow) {
  const auto f = lqsplit::split_game_flow(Matrix::Ones(6, 2), 2, 0.1);
  EXPECT_EQ(f.V.size(), 2u);
  EXPECT_EQ(f.U.rows(), 2);
}

TEST(Games, ValidationOfZeroSumMode) {
  auto g = zero_sum_scalar();
  EXPECT_TRUE(g.zero_sum());
  EXPECT_NO_THROW(lqsplit::validate(g));
  EXPECT_THROW(lqsplit::to_coupled(g), lqsplit::MisuseError);

  auto missing = g;
  missing.cross[1][0] = TimeMatrix();
  EXPECT_THROW(lqsplit::validate(missing), lqsplit::InputError);

  auto indefinite = g;
  indefinite.cross[0][1] = c1(-1);
  EXPECT_THROW(lqsplit::validate(indefinite), lqsplit::InputError);

  auto three = g;
  three.players.push_back(three.players[0]);
  three.cross = {{{}, c1(1), c1(1)}, {c1(1), {}, c1(1)}, {c1(1), c1(1), {}}};
  EXPECT_THROW(lqsplit::validate(three), lqsplit::InputError);
}

TEST(Games, ValidationOfPlayers) {
  std::mt19937 rng(5);
  auto g = nash_game(rng);
  g.players[1].B = TimeMatrix::constant(Matrix::Ones(3, 1));
  EXPECT_THROW(lqsplit::validate(g), lqsplit::DimensionError);
  g = nash_game(rng);
  g.players.clear();
  EXPECT_THROW(lqsplit::validate(g), lqsplit::InputError);
}

TEST(ZeroSum, ForwardOrderFourAndBackwardAccuracy) {
  const auto g = zero_sum_scalar();
  lqsplit::ZeroSumOptions fine;
  fine.steps_forward = 512;
  const double ref = lqsplit::solve_zero_sum(g, fine).final().x(0);
  std::vector<double> h, e;
  for (std::size_t k : {4, 8, 16, 32}) {
    lqsplit::ZeroSumOptions o;
    o.steps_forward = k;
    h.push_back(1.0 / static_cast<double>(k));
    e.push_back(std::abs(lqsplit::solve_zero_sum(g, o).final().x(0) - ref));
  }
  EXPECT_NEAR(oracle::slope(h, e), 4.0, 0.3);
  const auto t = lqsplit::solve_zero_sum(g, fine);
  EXPECT_LE(t.backward_error, 1e-10);
  EXPECT_EQ(t.samples.size(), 513u);
}

TEST(ZeroSum, CustomAlphasMustSumToOne) {
  lqsplit::ZeroSumOptions o;
  o.alphas = {0.3, 0.3};
  EXPECT_THROW(lqsplit::solve_zero_sum(zero_sum_scalar(), o), lqsplit::ConfigError);
  o.alphas = {1.0};
  EXPECT_NO_THROW(lqsplit::solve_zero_sum(zero_sum_scalar(), o));
}

TEST(ZeroSum, RejectsNonZeroSumGame) {
  std::mt19937 rng(1);
  EXPECT_THROW(lqsplit::solve_zero_sum(nash_game(rng), {}), lqsplit::MisuseError);
}
