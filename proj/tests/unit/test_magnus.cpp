#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lqsplit/errors.hpp"
#include "lqsplit/magnus.hpp"
#include "lqsplit/matfun.hpp"
#include "support/oracles.hpp"

namespace mg = lqsplit::magnus;
using lqsplit::Matrix;
using lqsplit::TimeMatrix;

TEST(Cf4, ConstantCoefficientIsExact) {
  std::mt19937 rng(2);
  const Matrix m = oracle::random_matrix(rng, 3, 3);
  const mg::LinearFlowProblem p{TimeMatrix::constant(m)};
  const Matrix y = mg::cf4_step(p, 0.0, 0.4, Matrix::Identity(3, 3));
  EXPECT_LE(oracle::max_abs(y - oracle::taylor_expm(0.4 * m)), 1e-14);
}

TEST(Cf4, FourthOrderOnNonCommutingFamily) {
  Matrix a0(2, 2), a1(2, 2);
  a0 << 0, 1, -4, 0;
  a1 << 0, 0, 1, 0;
  const auto field = [=](double t) { return Matrix(a0 + t * t * a1); };
  const mg::LinearFlowProblem p{TimeMatrix(field, 2, 2)};
  const Matrix y0 = Matrix::Identity(2, 2);
  const Matrix exact =
      oracle::rk4([&](double t, const Matrix& y) { return Matrix(field(t) * y); }, 0, 1, 40000, y0);
  std::vector<double> h, e;
  for (std::size_t k : {10, 20, 40, 80}) {
    h.push_back(1.0 / static_cast<double>(k));
    e.push_back(oracle::max_abs(mg::integrate(p, 0, 1, k, y0) - exact));
  }
  EXPECT_NEAR(oracle::slope(h, e), 4.0, 0.15);
}

TEST(Cf4, BackwardUndoesForward) {
  const mg::LinearFlowProblem p{
      TimeMatrix([](double t) { return Matrix::Constant(1, 1, std::sin(t)); }, 1, 1)};
  const Matrix y1 = mg::integrate(p, 0.0, 2.0, 50, Matrix::Constant(1, 1, 1.0));
  const double exact = std::exp(1.0 - std::cos(2.0));
  EXPECT_NEAR(y1(0, 0), exact, 1e-8);
  const mg::LinearFlowProblem back{p.M, mg::Direction::backward};
  EXPECT_THROW(mg::integrate(p, 2.0, 0.0, 50, y1), lqsplit::MisuseError);
  const Matrix y0 = mg::integrate(back, 2.0, 0.0, 50, y1);
  EXPECT_NEAR(y0(0, 0), 1.0, 1e-8);
}

TEST(Cf4, CountsSamplesAndExponentials) {
  const mg::LinearFlowProblem p{
      TimeMatrix([](double t) { return Matrix::Constant(1, 1, t); }, 1, 1)};
  mg::Counts counts;
  mg::integrate(p, 0.0, 1.0, 7, Matrix::Identity(1, 1), &counts);
  EXPECT_EQ(counts.exponentials, 14u);
  EXPECT_EQ(counts.samples, 21u);
}

TEST(Cf4, BlockOfColumns) {
  std::mt19937 rng(4);
  const Matrix m = oracle::random_matrix(rng, 4, 4);
  const Matrix cols = oracle::random_matrix(rng, 4, 2);
  const mg::LinearFlowProblem p{TimeMatrix::constant(m)};
  EXPECT_LE(oracle::max_abs(mg::cf4_step(p, 0, -0.3, cols) - oracle::taylor_expm(-0.3 * m) * cols),
            1e-14);
}
