#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lqsplit/bench.hpp"
#include "lqsplit/errors.hpp"
#include "lqsplit/games.hpp"
#include "lqsplit/pipeline.hpp"
#include "lqsplit/splitting.hpp"
#include "support/oracles.hpp"

using lqsplit::Matrix;
using lqsplit::Method;
using lqsplit::Vector;

namespace {

struct Fixture {
  lqsplit::PollutionConfig cfg;
  lqsplit::CoupledSystem sys;
  Matrix v0;
  explicit Fixture(const char* name)
      : cfg(lqsplit::pollution_preset(name)),
        sys(lqsplit::to_coupled(lqsplit::build_pollution(cfg))),
        v0(lqsplit::riccati::backward_pass(sys).v) {}

  lqsplit::Trajectory run(Method m, std::size_t k) const {
    lqsplit::SolveOptions o;
    o.method = m;
    o.steps = k;
    o.dominant = lqsplit::pollution_dominant(cfg);
    return lqsplit::solve_forward(sys, v0, o);
  }
};

const Fixture& fig1() {
  static const Fixture f("fig1");
  return f;
}
const Fixture& fig3a() {
  static const Fixture f("fig3a");
  return f;
}

}  // namespace

TEST(Schemes, BuiltinNamesAndLookup) {
  EXPECT_EQ(lqsplit::builtin_schemes().size(), 7u);
  EXPECT_EQ(lqsplit::find_scheme("SP4").name, "sp4");
  EXPECT_THROW(lqsplit::find_scheme("sp3"), lqsplit::ConfigError);
  EXPECT_EQ(lqsplit::find_scheme("ni84").kind, lqsplit::SchemeKind::near_integrable);
  EXPECT_EQ(lqsplit::find_scheme("s2c4").kind, lqsplit::SchemeKind::composition);
}

TEST(Schemes, PalindromeDetection) {
  EXPECT_TRUE(lqsplit::is_palindromic(lqsplit::find_scheme("sp2")));
  EXPECT_TRUE(lqsplit::is_palindromic(lqsplit::find_scheme("ni84")));
  EXPECT_FALSE(lqsplit::is_palindromic(lqsplit::find_scheme("sp1")));
  auto broken = lqsplit::find_scheme("sp4");
  broken.a[1] += 1e-6;
  EXPECT_FALSE(lqsplit::is_palindromic(broken));
}

TEST(Schemes, TripleJumpWeights) {
  const auto w = lqsplit::triple_jump_alphas();
  double sum = 0;
  for (double v : w) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-15);
  // Cubic error cancellation of a symmetric second-order base.
  double cubes = 0;
  for (double v : w) cubes += v * v * v;
  EXPECT_NEAR(cubes, 0.0, 1e-14);
}

TEST(Compose, RejectsWeightsNotSummingToOne) {
  const lqsplit::StepMap id = [](double, const lqsplit::ExtendedState& s) { return s; };
  EXPECT_THROW(lqsplit::compose(id, {0.5, 0.4}), lqsplit::ConfigError);
  EXPECT_NO_THROW(lqsplit::compose(id, {0.5, 0.5}));
}

TEST(Splitting, EvaluationCountsPerScheme) {
  const std::size_t k = 12;
  EXPECT_EQ(fig1().run(Method::sp1, k).evaluations, k);
  EXPECT_EQ(fig1().run(Method::sp2, k).evaluations, k + 1);
  EXPECT_EQ(fig1().run(Method::sp4, k).evaluations, 6 * k);
  EXPECT_EQ(fig1().run(Method::sp6, k).evaluations, 10 * k + 1);
  EXPECT_EQ(fig1().run(Method::s2c4, k).evaluations, 5 * k);
  EXPECT_EQ(fig1().run(Method::ni42, k).evaluations, 2 * k);
  EXPECT_EQ(fig1().run(Method::ni84, k).evaluations, 5 * k);
  EXPECT_EQ(fig1().run(Method::rk4, k).evaluations, 4 * k);
}

TEST(Splitting, SamplesEveryStepAndEndsAtHorizon) {
  const auto t = fig3a().run(Method::sp4, 10);
  ASSERT_EQ(t.samples.size(), 11u);
  EXPECT_EQ(t.samples.front().t, 0.0);
  EXPECT_EQ(t.samples.back().t, 1.0);
  EXPECT_EQ(t.samples.front().x(0), 10.0);
}

TEST(Splitting, AutonomousAndGeneralPathsAgree) {
  const auto& f = fig1();
  lqsplit::SplittingIntegrator a(f.sys, lqsplit::find_scheme("sp4"));
  lqsplit::SplittingIntegrator b(f.sys, lqsplit::find_scheme("sp4"));
  lqsplit::ExtendedState s{f.v0, f.sys.x0(), 0.0, 0.0};
  lqsplit::ExtendedState r = s;
  for (int i = 0; i < 4; ++i) {
    s = a.step_autonomous(0.25, s);
    r = b.step_nonautonomous(0.25, r);
  }
  EXPECT_LE((s.x - r.x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(oracle::max_abs(s.v - r.v), 1e-12);
}

TEST(Splitting, MisuseIsRejected) {
  const auto& f = fig3a();
  lqsplit::SplittingIntegrator a(f.sys, lqsplit::find_scheme("sp2"));
  lqsplit::ExtendedState s{f.v0, f.sys.x0(), 0.0, 0.0};
  EXPECT_THROW(a.step_autonomous(0.1, s), lqsplit::MisuseError);
  EXPECT_THROW(lqsplit::SplittingIntegrator(f.sys, lqsplit::find_scheme("ni42")),
               lqsplit::MisuseError);
  EXPECT_THROW(lqsplit::NearIntegrableIntegrator(f.sys, lqsplit::find_scheme("ni42"), std::nullopt),
               lqsplit::MisuseError);
  EXPECT_THROW(
      lqsplit::NearIntegrableIntegrator(f.sys, lqsplit::find_scheme("sp4"), Matrix::Ones(1, 1)),
      lqsplit::MisuseError);
}

TEST(Splitting, NearIntegrableNeedsDominantForVaryingA) {
  lqsplit::SolveOptions o;
  o.method = Method::ni42;
  o.steps = 4;
  EXPECT_THROW(lqsplit::solve_forward(fig3a().sys, fig3a().v0, o), lqsplit::MisuseError);
  o.dominant = Matrix::Constant(1, 1, -2.0);
  EXPECT_NO_THROW(lqsplit::solve_forward(fig3a().sys, fig3a().v0, o));
}

TEST(Splitting, StrangOrderTwoOnVaryingProblem) {
  const auto& f = fig3a();
  const auto ref = f.run(Method::sp6, 256).final().x(0);
  std::vector<double> h, e;
  for (std::size_t k : {8, 16, 32, 64}) {
    h.push_back(1.0 / static_cast<double>(k));
    e.push_back(std::abs(f.run(Method::sp2, k).final().x(0) - ref));
  }
  EXPECT_NEAR(oracle::slope(h, e), 2.0, 0.1);
}

TEST(Splitting, S2StepIsSymmetric) {
  const auto& f = fig3a();
  lqsplit::ExtendedState s{f.v0, f.sys.x0(), 0.2, 0.2};
  const auto fwd = lqsplit::s2_step(0.1, s, f.sys);
  const auto back = lqsplit::s2_step(-0.1, fwd, f.sys);
  EXPECT_LE((back.x - s.x).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LE(oracle::max_abs(back.v - s.v), 1e-13);
}

TEST(Splitting, ExactFlowKeepsTerminalCondition) {
  const auto& f = fig1();
  for (Method m : {Method::sp1, Method::sp2, Method::sp4, Method::sp6}) {
    EXPECT_LE(f.run(m, 5).terminal_defect(f.sys.terminal_weights()), 1e-11)
        << lqsplit::method_name(m);
  }
}
