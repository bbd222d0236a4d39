#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lqsplit/games.hpp"
#include "lqsplit/pipeline.hpp"

namespace lqsplit {

/// Scalar time function from a small catalog: a constant or the ramp
/// base + amplitude * tanh(rate * (t - center)).
struct TimeFunction {
  enum class Kind { constant, tanh_ramp };

  Kind kind = Kind::constant;
  double base = 0.0;
  double amplitude = 0.0;
  double rate = 0.0;
  double center = 0.0;

  static TimeFunction constant(double value);
  static TimeFunction tanh_ramp(double base, double amplitude, double rate, double center);

  double operator()(double t) const;
  bool is_constant() const { return kind == Kind::constant || amplitude == 0.0 || rate == 0.0; }
};

/// Air-pollution emission game: scalar state x' = -a x + b sum_i u_i with
/// player weights Q_i = d_i e^{-rho t}, R_ii = c_i e^{-rho t} and Q_iT = 0.
struct PollutionConfig {
  std::size_t players = 1;
  TimeFunction a = TimeFunction::constant(1.0);
  TimeFunction b = TimeFunction::constant(1.0);
  std::vector<double> c;
  std::vector<double> d;
  double rho = 0.0;
  double T = 1.0;
  double x0 = 10.0;
};

/// c_i = scale (offset + i), i = 1..players.
std::vector<double> linear_generator(std::size_t players, double offset, double scale);

/// Built-in configurations "fig1", "fig2", "fig3a" and "fig3b".
PollutionConfig pollution_preset(std::string_view name);
const std::vector<std::string>& preset_names();

/// Throws ConfigError on nonpositive c_i, d_i, zero b or a player-count mismatch.
void validate(const PollutionConfig& cfg);

GameProblem build_pollution(const PollutionConfig& cfg);

/// -a as a 1x1 matrix when a is constant, the dominant part used by the
/// near-integrable methods.
std::optional<Matrix> pollution_dominant(const PollutionConfig& cfg);

/// One row of a work-precision sweep.
struct SweepResult {
  std::string method;
  double resolution = 0.0;  // step size, or absolute tolerance for dopri
  std::size_t evaluations = 0;
  double seconds = 0.0;
  double x_error = 0.0;         // max_k |x_k(T) - x_ap,k(T)|
  double gain_defect = 0.0;     // max_i ||P_i(T) - Q_iT||_inf
  bool positivity_flag = false; // some P_i(T) has an eigenvalue below the threshold
  double terminal_min_eigenvalue = 0.0;  // min_i lambda_min(P_i(T))
  double path_min_eigenvalue = 0.0;      // same over every sampled step, not written to CSV
  double symmetry_defect = 0.0; // max over samples of ||P - P^T||_inf before symmetrizing
  std::string error;            // non-empty when the solve failed
};

struct SweepSpec {
  std::vector<Method> methods;
  std::vector<double> h_ladder;
  std::vector<int> tol_ladder;
  /// Reference resolution relative to the finest step of the ladder.
  std::size_t reference_factor = 100;
  double positivity_threshold = -1e-8;
  /// Wall-clock timing; off keeps the output reproducible byte for byte.
  bool timing = false;
  std::optional<Matrix> dominant;
  double backward_tolerance = 1e-12;
};

std::vector<double> default_h_ladder();
std::vector<int> default_tol_ladder();

struct ReferenceSolution {
  Vector xT;
  std::size_t steps = 0;       // CF4 steps of the accepted solve, 0 when closed form
  double self_check = 0.0;     // max-norm difference between the R and 2R solves
};

/// x(T) = U(T) U0^-1 x0 along the exact forward flow from v0. U(T) comes
/// from expm for constant coefficients and otherwise from CF4 at R and 2R
/// steps, with R doubled until the two agree to 1e-11.
ReferenceSolution reference_endpoint(const CoupledSystem& sys, const Matrix& v0,
                                     std::size_t min_steps);

/// Runs every (method, resolution) pair on the game's coupled system. Row
/// failures are recorded in SweepResult::error.
std::vector<SweepResult> run_sweep(const GameProblem& game, const SweepSpec& spec);

/// CSV text with header
/// method,resolution,evaluations,seconds,x_error,gain_defect,positivity_flag,symmetry_defect.
/// Reals use 17 significant digits independent of the locale.
std::string format_csv(const std::vector<SweepResult>& results);

/// Writes format_csv() to `path`. Throws InputError on empty input and
/// Error naming the path on I/O failure.
void emit_csv(const std::vector<SweepResult>& results, const std::string& path);

/// 17 significant digits via std::to_chars; "nan", "inf" and "-inf" for
/// non-finite values.
std::string format_real(double v);

}  // namespace lqsplit
