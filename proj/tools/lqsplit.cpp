// Command-line front end: solve a problem file, run a pollution-game preset,
// or sweep methods over a step-size ladder into a CSV file.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "lqsplit/bench.hpp"
#include "lqsplit/config.hpp"
#include "lqsplit/errors.hpp"
#include "lqsplit/games.hpp"
#include "lqsplit/pipeline.hpp"

namespace {

using lqsplit::format_real;

struct CommonOptions {
  std::string method = "sp4";
  std::size_t steps = 32;
  int tol_exponent = 8;
  std::string output;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--method", o.method, "sp1|sp2|sp4|sp6|s2c4|ni42|ni84|rk4|dopri")
      ->capture_default_str();
  cmd->add_option("--steps", o.steps, "uniform forward steps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--tol-exponent", o.tol_exponent, "dopri tolerances 10^-i (abs), 10^(1-i) (rel)")
      ->check(CLI::Range(1, 14))
      ->capture_default_str();
  cmd->add_option("--output", o.output, "trajectory CSV (t, x, gains, controls)");
}

lqsplit::SolveOptions solve_options(const CommonOptions& o, std::optional<lqsplit::Matrix> dominant) {
  lqsplit::SolveOptions s;
  s.method = lqsplit::parse_method(o.method);
  s.steps = o.steps;
  s.tol_exponent = o.tol_exponent;
  s.dominant = std::move(dominant);
  return s;
}

void write_trajectory(const lqsplit::Trajectory& traj, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw lqsplit::Error("cannot open " + path + " for writing");
  }
  const auto& first = traj.samples.front();
  f << "t";
  for (Eigen::Index i = 0; i < first.x.size(); ++i) {
    f << ",x" << i + 1;
  }
  for (std::size_t p = 0; p < first.gains.size(); ++p) {
    const auto& g = first.gains[p];
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      for (Eigen::Index c = r; c < g.cols(); ++c) {
        f << ",P" << p + 1 << '_' << r + 1 << c + 1;
      }
    }
  }
  for (std::size_t p = 0; p < first.controls.size(); ++p) {
    for (Eigen::Index k = 0; k < first.controls[p].size(); ++k) {
      f << ",u" << p + 1 << '_' << k + 1;
    }
  }
  f << '\n';
  for (const auto& s : traj.samples) {
    f << format_real(s.t);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
      f << ',' << format_real(s.x(i));
    }
    for (const auto& g : s.gains) {
      for (Eigen::Index r = 0; r < g.rows(); ++r) {
        for (Eigen::Index c = r; c < g.cols(); ++c) {
          f << ',' << format_real(g(r, c));
        }
      }
    }
    for (const auto& u : s.controls) {
      for (Eigen::Index k = 0; k < u.size(); ++k) {
        f << ',' << format_real(u(k));
      }
    }
    f << '\n';
  }
  if (!f) {
    throw lqsplit::Error("write to " + path + " failed");
  }
}

void print_summary(const std::string& label, const lqsplit::Trajectory& traj) {
  const auto& end = traj.final();
  std::cout << "method:             " << label << '\n'
            << "evaluations:        " << traj.evaluations << '\n'
            << "backward steps:     " << traj.backward_steps << '\n'
            << "backward error:     " << format_real(traj.backward_error) << '\n'
            << "x(T):              ";
  for (Eigen::Index i = 0; i < end.x.size(); ++i) {
    std::cout << ' ' << format_real(end.x(i));
  }
  std::cout << '\n'
            << "min eigenvalue:     " << format_real(traj.min_eigenvalue()) << '\n'
            << "symmetry defect:    " << format_real(traj.max_symmetry_defect()) << '\n';
}

template <typename T>
std::vector<T> split_list(const std::string& text) {
  std::vector<T> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    if (item.empty()) {
      continue;
    }
    try {
      if constexpr (std::is_same_v<T, double>) {
        out.push_back(std::stod(item));
      } else if constexpr (std::is_same_v<T, int>) {
        out.push_back(std::stoi(item));
      } else {
        out.push_back(item);
      }
    } catch (const std::logic_error&) {
      throw lqsplit::ConfigError("cannot parse list entry '" + item + "'");
    }
  }
  return out;
}

// h-ladder entries may be written as fractions, e.g. 1/64.
std::vector<double> parse_ladder(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list<std::string>(text)) {
    const auto slash = item.find('/');
    try {
      if (slash == std::string::npos) {
        out.push_back(std::stod(item));
      } else {
        out.push_back(std::stod(item.substr(0, slash)) / std::stod(item.substr(slash + 1)));
      }
    } catch (const std::logic_error&) {
      throw lqsplit::ConfigError("cannot parse step size '" + item + "'");
    }
  }
  return out;
}

struct GameOptions {
  std::string preset = "fig1";
  std::size_t players = 0;
  std::optional<double> c_offset;
  double c_scale = 0.5;
  std::vector<double> c_values;
  bool zero_sum = false;
  double cross_weight = 1.0;
  std::size_t backward_steps = 32;
};

lqsplit::PollutionConfig preset_config(const GameOptions& g) {
  auto cfg = lqsplit::pollution_preset(g.preset);
  if (g.players > 0 && g.players != cfg.players) {
    cfg.players = g.players;
    cfg.c = lqsplit::linear_generator(cfg.players, g.c_offset.value_or(10.0), g.c_scale);
  } else if (g.c_offset) {
    cfg.c = lqsplit::linear_generator(cfg.players, *g.c_offset, g.c_scale);
  }
  if (!g.c_values.empty()) {
    cfg.c = g.c_values;
    cfg.players = cfg.c.size();
  }
  cfg.d.resize(cfg.c.size());
  for (std::size_t i = 0; i < cfg.c.size(); ++i) {
    cfg.d[i] = 1.0 / cfg.c[i];
  }
  return cfg;
}

int run_game(const GameOptions& g, const CommonOptions& common) {
  const auto cfg = preset_config(g);
  auto game = lqsplit::build_pollution(cfg);
  if (g.zero_sum) {
    if (game.player_count() != 2) {
      throw lqsplit::ConfigError("--zero-sum needs exactly two players (use --players 2)");
    }
    const auto r = lqsplit::TimeMatrix::constant(lqsplit::Matrix::Constant(1, 1, g.cross_weight));
    game.cross = {{{}, r}, {r, {}}};
    lqsplit::validate(game);
    lqsplit::ZeroSumOptions z;
    z.steps_backward = g.backward_steps;
    z.steps_forward = common.steps;
    const auto traj = lqsplit::solve_zero_sum(game, z);
    print_summary("zero-sum (triple-jump composition)", traj);
    if (!common.output.empty()) {
      write_trajectory(traj, common.output);
    }
    return 0;
  }
  const auto opts = solve_options(common, lqsplit::pollution_dominant(cfg));
  const auto traj = lqsplit::solve_game(game, opts);
  print_summary(std::string(lqsplit::method_name(opts.method)), traj);
  if (!common.output.empty()) {
    write_trajectory(traj, common.output);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Splitting integrators for linear-quadratic control problems and games"};
  app.require_subcommand(1);

  CommonOptions solve_common;
  std::string problem_file;
  auto* solve = app.add_subcommand("solve", "solve a YAML problem file");
  solve->add_option("--problem", problem_file, "YAML problem file")->required();
  add_common(solve, solve_common);

  CommonOptions game_common;
  GameOptions game_opts;
  auto* game = app.add_subcommand("game", "solve a pollution-game preset");
  game->add_option("--preset", game_opts.preset, "fig1|fig2|fig3a|fig3b")->capture_default_str();
  game->add_option("--players", game_opts.players, "override the number of players");
  game->add_option("--c-offset", game_opts.c_offset, "generate c_i = scale * (offset + i)");
  game->add_option("--c-scale", game_opts.c_scale, "scale of the c generator")->capture_default_str();
  game->add_option("--c", game_opts.c_values, "explicit control weights, one per player")
      ->delimiter(',');
  game->add_flag("--zero-sum", game_opts.zero_sum, "two-player zero-sum mode");
  game->add_option("--cross-weight", game_opts.cross_weight, "cross weights R12 = R21 (zero-sum)")
      ->capture_default_str();
  game->add_option("--backward-steps", game_opts.backward_steps, "zero-sum backward steps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(game, game_common);

  std::string sweep_preset = "fig1";
  std::string sweep_problem;
  std::string methods = "sp2,sp4,sp6,rk4";
  std::string h_ladder;
  std::string tol_ladder;
  std::string sweep_output;
  bool timing = false;
  auto* sweep = app.add_subcommand("sweep", "work-precision sweep into a CSV file");
  auto* preset_opt = sweep->add_option("--preset", sweep_preset, "fig1|fig2|fig3a|fig3b");
  sweep->add_option("--problem", sweep_problem, "YAML problem file instead of a preset")
      ->excludes(preset_opt);
  sweep->add_option("--methods", methods, "comma-separated method names")->capture_default_str();
  sweep->add_option("--h-ladder", h_ladder, "comma-separated step sizes (default 2^-2..2^-8)");
  sweep->add_option("--tol-ladder", tol_ladder, "comma-separated dopri exponents (default 3..10)");
  sweep->add_option("--output", sweep_output, "CSV file")->required();
  sweep->add_flag("--timing", timing, "record wall-clock seconds (output no longer reproducible)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const auto loaded = lqsplit::load_problem(problem_file);
      const auto opts = solve_options(solve_common, loaded.dominant);
      const auto traj = lqsplit::solve_game(loaded.game, opts);
      print_summary(std::string(lqsplit::method_name(opts.method)), traj);
      if (!solve_common.output.empty()) {
        write_trajectory(traj, solve_common.output);
      }
      return 0;
    }
    if (*game) {
      return run_game(game_opts, game_common);
    }
    lqsplit::SweepSpec spec;
    for (const auto& name : split_list<std::string>(methods)) {
      spec.methods.push_back(lqsplit::parse_method(name));
    }
    spec.h_ladder = parse_ladder(h_ladder);
    spec.tol_ladder = split_list<int>(tol_ladder);
    spec.timing = timing;
    lqsplit::GameProblem problem;
    if (!sweep_problem.empty()) {
      const auto loaded = lqsplit::load_problem(sweep_problem);
      problem = loaded.game;
      spec.dominant = loaded.dominant;
    } else {
      const auto cfg = lqsplit::pollution_preset(sweep_preset);
      problem = lqsplit::build_pollution(cfg);
      spec.dominant = lqsplit::pollution_dominant(cfg);
    }
    const auto rows = lqsplit::run_sweep(problem, spec);
    lqsplit::emit_csv(rows, sweep_output);
    std::size_t failed = 0;
    for (const auto& r : rows) {
      if (!r.error.empty()) {
        ++failed;
        std::cerr << "warning: " << r.method << " at " << format_real(r.resolution) << ": " << r.error
                  << '\n';
      }
    }
    std::cout << "wrote " << rows.size() << " rows to " << sweep_output << '\n';
    return failed == 0 ? 0 : 3;
  } catch (const lqsplit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
