#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <algorithm>
#include <limits>

#include <gtest/gtest.h>

#include "lqsplit/bench.hpp"
#include "lqsplit/errors.hpp"

using lqsplit::Method;

TEST(TimeFunction, ConstantAndRamp) {
  EXPECT_DOUBLE_EQ(lqsplit::TimeFunction::constant(3)(7), 3.0);
  const auto r = lqsplit::TimeFunction::tanh_ramp(2, 1, 5, 0.5);
  EXPECT_DOUBLE_EQ(r(0.5), 2.0);
  EXPECT_NEAR(r(0.0), 2 + std::tanh(-2.5), 1e-15);
  EXPECT_FALSE(r.is_constant());
  EXPECT_TRUE(lqsplit::TimeFunction::tanh_ramp(2, 0, 5, 0).is_constant());
}

TEST(Presets, Parameters) {
  const auto f1 = lqsplit::pollution_preset("fig1");
  ASSERT_EQ(f1.players, 10u);
  EXPECT_DOUBLE_EQ(f1.c.front(), 5.5);
  EXPECT_DOUBLE_EQ(f1.c.back(), 10.0);
  EXPECT_DOUBLE_EQ(f1.d[3], 1.0 / f1.c[3]);
  EXPECT_DOUBLE_EQ(f1.a(0.3), 1.0);
  const auto f2 = lqsplit::pollution_preset("fig2");
  EXPECT_DOUBLE_EQ(f2.c.front(), 50.5);
  EXPECT_DOUBLE_EQ(f2.a(0.0), 2.0);
  EXPECT_DOUBLE_EQ(lqsplit::pollution_preset("fig3a").c[0], 5.5);
  EXPECT_DOUBLE_EQ(lqsplit::pollution_preset("fig3b").c[0], 50.5);
  EXPECT_DOUBLE_EQ(lqsplit::pollution_preset("fig3b").rho, 0.1);
  EXPECT_THROW(lqsplit::pollution_preset("fig4"), lqsplit::ConfigError);
  EXPECT_EQ(lqsplit::preset_names().size(), 4u);
}

TEST(Pollution, BuiltGameCoefficients) {
  const auto cfg = lqsplit::pollution_preset("fig3a");
  const auto g = lqsplit::build_pollution(cfg);
  EXPECT_FALSE(g.autonomous());
  EXPECT_NEAR(g.A(0.2)(0, 0), -cfg.a(0.2), 1e-15);
  EXPECT_NEAR(g.players[0].R(0.5)(0, 0), 5.5 * std::exp(-0.05), 1e-14);
  EXPECT_NEAR(g.players[0].Q(0.5)(0, 0), std::exp(-0.05) / 5.5, 1e-15);
  EXPECT_FALSE(lqsplit::pollution_dominant(cfg).has_value());
  const auto f1 = lqsplit::pollution_preset("fig1");
  EXPECT_TRUE(lqsplit::build_pollution(f1).autonomous());
  EXPECT_DOUBLE_EQ((*lqsplit::pollution_dominant(f1))(0, 0), -1.0);
}

TEST(Pollution, Validation) {
  auto cfg = lqsplit::pollution_preset("fig1");
  cfg.c[2] = -1;
  EXPECT_THROW(lqsplit::validate(cfg), lqsplit::ConfigError);
  cfg = lqsplit::pollution_preset("fig1");
  cfg.d.pop_back();
  EXPECT_THROW(lqsplit::build_pollution(cfg), lqsplit::ConfigError);
  cfg = lqsplit::pollution_preset("fig1");
  cfg.T = 0;
  EXPECT_THROW(lqsplit::validate(cfg), lqsplit::ConfigError);
}

TEST(LinearGenerator, Values) {
  const auto c = lqsplit::linear_generator(3, 100, 0.5);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_DOUBLE_EQ(c[0], 50.5);
  EXPECT_DOUBLE_EQ(c[2], 51.5);
}

TEST(FormatReal, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    const std::string s = lqsplit::format_real(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
  EXPECT_EQ(lqsplit::format_real(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(lqsplit::format_real(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(lqsplit::format_real(0.25), "0.25");
}

TEST(Sweep, RowsResolutionsAndCsv) {
  lqsplit::SweepSpec spec;
  spec.methods = {Method::sp2, Method::dopri};
  spec.h_ladder = {0.25, 0.1};
  spec.tol_ladder = {5, 7};
  const auto rows = lqsplit::run_sweep(lqsplit::build_pollution(lqsplit::pollution_preset("fig3a")), spec);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].method, "sp2");
  EXPECT_DOUBLE_EQ(rows[0].resolution, 0.25);
  EXPECT_DOUBLE_EQ(rows[1].resolution, 0.1);
  EXPECT_EQ(rows[1].evaluations, 11u);
  EXPECT_DOUBLE_EQ(rows[2].resolution, 1e-5);
  EXPECT_LT(rows[3].x_error, rows[2].x_error);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_EQ(r.seconds, 0.0);
    EXPECT_GT(r.x_error, 0.0);
    EXPECT_EQ(r.positivity_flag, r.terminal_min_eigenvalue < spec.positivity_threshold);
    EXPECT_LE(r.path_min_eigenvalue, r.terminal_min_eigenvalue);
  }
  const std::string csv = lqsplit::format_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "method,resolution,evaluations,seconds,x_error,gain_defect,positivity_flag,symmetry_defect");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(Sweep, TimingColumnWhenRequested) {
  lqsplit::SweepSpec spec;
  spec.methods = {Method::sp6};
  spec.h_ladder = {0.01};
  spec.timing = true;
  const auto rows = lqsplit::run_sweep(lqsplit::build_pollution(lqsplit::pollution_preset("fig1")), spec);
  EXPECT_GT(rows[0].seconds, 0.0);
}

TEST(Sweep, RejectsEmptyAndBadLadders) {
  lqsplit::SweepSpec spec;
  const auto g = lqsplit::build_pollution(lqsplit::pollution_preset("fig1"));
  EXPECT_THROW(lqsplit::run_sweep(g, spec), lqsplit::ConfigError);
  spec.methods = {Method::sp2};
  spec.h_ladder = {0.1, -0.1};
  EXPECT_THROW(lqsplit::run_sweep(g, spec), lqsplit::ConfigError);
}

TEST(EmitCsv, WritesFileAndRejectsEmpty) {
  const auto path = (std::filesystem::temp_directory_path() / "lqsplit_emit_test.csv").string();
  EXPECT_THROW(lqsplit::emit_csv({}, path), lqsplit::InputError);
  lqsplit::SweepResult r;
  r.method = "sp4";
  r.resolution = 0.5;
  r.evaluations = 12;
  r.x_error = 1e-3;
  lqsplit::emit_csv({r}, path);
  std::ifstream f(path);
  const std::string text((std::istreambuf_iterator<char>(f)), {});
  std::filesystem::remove(path);
  EXPECT_NE(text.find("sp4,0.5,12,0,0.001,0,false,0\n"), std::string::npos);
}
