#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "lqsplit/bench.hpp"
#include "lqsplit/games.hpp"

namespace lqsplit {

/// Problem read from a YAML file. Exactly one of two sections is accepted:
///
///   pollution:                     # optionally seeded with `preset: fig1`
///     players: 10
///     a: 1                         # or {kind: tanh-ramp, base, amplitude, rate, center}
///     b: {kind: constant, value: 1}
///     c: [5.5, 6.0]                # or {offset: 10, scale: 0.5}: c_i = scale (offset + i)
///     d: reciprocal                # or an explicit list
///     rho: 0.1
///     horizon: 1
///     x0: 10
///
///   lq:                            # constant coefficients, matrices as row lists
///     A: [[0, 1], [-1, 0]]
///     B: [[0], [1]]
///     Q: [[1, 0], [0, 1]]
///     R: [[1]]
///     QT: [[0, 0], [0, 0]]
///     x0: [1, 0]
///     t0: 0
///     T: 2
///
/// A top-level `dominant` matrix overrides the default dominant part used
/// by the near-integrable methods.
struct LoadedProblem {
  GameProblem game;
  std::optional<PollutionConfig> pollution;
  std::optional<Matrix> dominant;
};

/// Throws ConfigError with the offending key on malformed input.
LoadedProblem parse_problem(std::string_view text);
LoadedProblem load_problem(const std::string& path);

}  // namespace lqsplit
