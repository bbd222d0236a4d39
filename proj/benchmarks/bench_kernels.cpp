#include <random>

#include <benchmark/benchmark.h>

#include "lqsplit/bench.hpp"
#include "lqsplit/games.hpp"
#include "lqsplit/magnus.hpp"
#include "lqsplit/matfun.hpp"
#include "lqsplit/pipeline.hpp"
#include "lqsplit/riccati.hpp"

namespace {

using lqsplit::Matrix;

Matrix random_matrix(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = g(rng);
  }
  return m;
}

void BM_Expm(benchmark::State& state) {
  const Matrix m = random_matrix(state.range(0), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lqsplit::matfun::expm(m));
  }
}
BENCHMARK(BM_Expm)->Arg(2)->Arg(11)->Arg(22)->Arg(64);

void BM_Pade2(benchmark::State& state) {
  const Matrix m = random_matrix(state.range(0), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lqsplit::matfun::pade2(m, 0.01));
  }
}
BENCHMARK(BM_Pade2)->Arg(2)->Arg(11)->Arg(22)->Arg(64);

void BM_Cf4Step(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Matrix a = random_matrix(n, 3);
  const Matrix b = random_matrix(n, 4);
  const lqsplit::magnus::LinearFlowProblem p{
      lqsplit::TimeMatrix([a, b](double t) { return Matrix(a + std::sin(t) * b); }, n, n)};
  const Matrix y = Matrix::Identity(n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lqsplit::magnus::cf4_step(p, 0.0, 0.01, y));
  }
}
BENCHMARK(BM_Cf4Step)->Arg(2)->Arg(22);

// Forward pass on a preset; the backward pass is done once outside the loop.
void forward(benchmark::State& state, const char* preset, lqsplit::Method method) {
  const auto cfg = lqsplit::pollution_preset(preset);
  const auto sys = lqsplit::to_coupled(lqsplit::build_pollution(cfg));
  const Matrix v0 = lqsplit::riccati::backward_pass(sys).v;
  lqsplit::SolveOptions opts;
  opts.method = method;
  opts.steps = static_cast<std::size_t>(state.range(0));
  opts.dominant = lqsplit::pollution_dominant(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lqsplit::solve_forward(sys, v0, opts));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK_CAPTURE(forward, fig1_sp2, "fig1", lqsplit::Method::sp2)->Arg(64);
BENCHMARK_CAPTURE(forward, fig1_sp4, "fig1", lqsplit::Method::sp4)->Arg(64);
BENCHMARK_CAPTURE(forward, fig1_sp6, "fig1", lqsplit::Method::sp6)->Arg(64);
BENCHMARK_CAPTURE(forward, fig1_rk4, "fig1", lqsplit::Method::rk4)->Arg(96);
BENCHMARK_CAPTURE(forward, fig2_ni84, "fig2", lqsplit::Method::ni84)->Arg(64);
BENCHMARK_CAPTURE(forward, fig3a_sp4, "fig3a", lqsplit::Method::sp4)->Arg(64);
BENCHMARK_CAPTURE(forward, fig3a_s2c4, "fig3a", lqsplit::Method::s2c4)->Arg(64);

void BM_BackwardPass(benchmark::State& state) {
  const auto sys = lqsplit::to_coupled(lqsplit::build_pollution(lqsplit::pollution_preset("fig3a")));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lqsplit::riccati::backward_pass(sys));
  }
}
BENCHMARK(BM_BackwardPass);

void BM_ZeroSum(benchmark::State& state) {
  auto cfg = lqsplit::pollution_preset("fig1");
  cfg.players = 2;
  cfg.c = {5.5, 6.0};
  cfg.d = {1 / 5.5, 1 / 6.0};
  auto game = lqsplit::build_pollution(cfg);
  const auto r = lqsplit::TimeMatrix::constant(Matrix::Constant(1, 1, 3.0));
  game.cross = {{{}, r}, {r, {}}};
  lqsplit::ZeroSumOptions opts;
  opts.steps_forward = 64;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lqsplit::solve_zero_sum(game, opts));
  }
}
BENCHMARK(BM_ZeroSum);

}  // namespace
BENCHMARK_MAIN();
