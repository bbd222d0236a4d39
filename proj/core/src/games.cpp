#include "lqsplit/games.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "lqsplit/errors.hpp"
#include "lqsplit/riccati.hpp"
#include "lqsplit/splitting.hpp"

namespace lqsplit {

namespace {

std::string player_name(std::size_t i) { return "player " + std::to_string(i + 1); }

bool has_cross(const GameProblem& g, std::size_t i, std::size_t j) {
  return i < g.cross.size() && j < g.cross[i].size() && !g.cross[i][j].empty();
}

LQProblem player_problem(const GameProblem& g, std::size_t i) {
  const Player& p = g.players[i];
  return {g.A, p.B, p.Q, p.R, p.QT, g.x0, g.t0, g.T};
}

Coefficients game_coefficients(const GameProblem& g, double t) {
  Coefficients c;
  c.A = g.A(t);
  for (std::size_t i = 0; i < g.players.size(); ++i) {
    Matrix S;
    Matrix feedback;
    feedback_blocks(g.players[i].B(t), g.players[i].R(t), t, player_name(i), S, feedback);
    c.S.push_back(std::move(S));
    c.Q.push_back(g.players[i].Q(t));
    c.feedback.push_back(std::move(feedback));
  }
  return c;
}

double max_norm(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Frozen data of the two-player zero-sum system.
struct ZeroSumData {
  Matrix A;
  Matrix S1, S2;    // B_i R_ii^-1 B_i^T
  Matrix S22, S11;  // cross blocks B_2 R_12^-1 B_2^T and B_1 R_21^-1 B_1^T
  Matrix Q1, Q2;
  Matrix F1, F2;  // R_ii^-1 B_i^T
};

ZeroSumData zero_sum_data(const GameProblem& g, double t) {
  ZeroSumData d;
  d.A = g.A(t);
  feedback_blocks(g.players[0].B(t), g.players[0].R(t), t, "player 1", d.S1, d.F1);
  feedback_blocks(g.players[1].B(t), g.players[1].R(t), t, "player 2", d.S2, d.F2);
  Matrix unused;
  feedback_blocks(g.players[1].B(t), g.cross[0][1](t), t, "cross weight R_12", d.S22, unused);
  feedback_blocks(g.players[0].B(t), g.cross[1][0](t), t, "cross weight R_21", d.S11, unused);
  d.Q1 = g.players[0].Q(t);
  d.Q2 = g.players[1].Q(t);
  return d;
}

struct PairState {
  Matrix P1;
  Matrix P2;
};

PairState quadratic_terms(const ZeroSumData& d, const PairState& a, const PairState& b) {
  return {a.P1 * d.S1 * b.P1 + a.P1 * d.S2 * b.P2 + a.P2 * d.S22 * b.P2,
          a.P2 * d.S2 * b.P2 + a.P2 * d.S1 * b.P1 + a.P1 * d.S11 * b.P1};
}

// P' = -Q - A^T P - P A solved exactly over tau. With
// exp(tau [[-A^T, Q], [0, A]]) = [[F11, F12], [0, F22]] one has
// F11 = exp(-tau A^T) and the forcing integral equals F12 F11^T.
struct LinearMap {
  Matrix F11;
  Matrix G;
};

LinearMap linear_map(const Matrix& A, const Matrix& Q, double tau) {
  const Index n = A.rows();
  Matrix z = Matrix::Zero(2 * n, 2 * n);
  z.topLeftCorner(n, n) = -A.transpose();
  z.topRightCorner(n, n) = Q;
  z.bottomRightCorner(n, n) = A;
  const Matrix e = matfun::expm(tau * z);
  LinearMap m;
  m.F11 = e.topLeftCorner(n, n);
  m.G = e.topRightCorner(n, n) * m.F11.transpose();
  return m;
}

Matrix apply_linear(const LinearMap& m, const Matrix& P) {
  return m.F11 * P * m.F11.transpose() - m.G;
}

// Degree-4 Taylor polynomial of the purely quadratic flow over tau.
PairState quadratic_map(const ZeroSumData& d, const PairState& p, double tau) {
  std::vector<PairState> c{p};
  for (int k = 0; k < 4; ++k) {
    PairState next{Matrix::Zero(p.P1.rows(), p.P1.cols()), Matrix::Zero(p.P2.rows(), p.P2.cols())};
    for (int j = 0; j <= k; ++j) {
      const PairState term = quadratic_terms(d, c[static_cast<std::size_t>(j)],
                                             c[static_cast<std::size_t>(k - j)]);
      next.P1 += term.P1;
      next.P2 += term.P2;
    }
    next.P1 /= static_cast<double>(k + 1);
    next.P2 /= static_cast<double>(k + 1);
    c.push_back(std::move(next));
  }
  PairState out = c.back();
  for (int k = 3; k >= 0; --k) {
    out.P1 = c[static_cast<std::size_t>(k)].P1 + tau * out.P1;
    out.P2 = c[static_cast<std::size_t>(k)].P2 + tau * out.P2;
  }
  return out;
}

// Symmetric base map over a signed step tau starting at t.
PairState base_map(const GameProblem& g, double t, double tau, const PairState& p) {
  const ZeroSumData d = zero_sum_data(g, t + 0.5 * tau);
  const LinearMap l1 = linear_map(d.A, d.Q1, 0.5 * tau);
  const LinearMap l2 = linear_map(d.A, d.Q2, 0.5 * tau);
  PairState s{apply_linear(l1, p.P1), apply_linear(l2, p.P2)};
  s = quadratic_map(d, s, tau);
  return {apply_linear(l1, s.P1), apply_linear(l2, s.P2)};
}

Matrix stack(const PairState& p) {
  Matrix m(p.P1.rows() + p.P2.rows(), p.P1.cols());
  m << p.P1, p.P2;
  return m;
}

PairState unstack(const Matrix& m, Index n) { return {m.topRows(n), m.bottomRows(n)}; }

Matrix backward_sweep(const GameProblem& g, std::size_t steps) {
  const double tau = (g.t0 - g.T) / static_cast<double>(steps);
  PairState p{g.players[0].QT, g.players[1].QT};
  for (std::size_t k = 0; k < steps; ++k) {
    p = base_map(g, g.T + static_cast<double>(k) * tau, tau, p);
    if (!p.P1.allFinite() || !p.P2.allFinite()) {
      std::ostringstream os;
      os << "solve_zero_sum: backward solution blew up near t = "
         << g.T + static_cast<double>(k + 1) * tau << " with " << steps << " steps";
      throw ConvergenceError(os.str());
    }
  }
  return stack(p);
}

Matrix closed_loop(const ZeroSumData& d, const PairState& p) {
  return d.A - d.S1 * p.P1 - d.S2 * p.P2;
}

}  // namespace

bool GameProblem::zero_sum() const {
  for (std::size_t i = 0; i < cross.size(); ++i) {
    for (std::size_t j = 0; j < cross[i].size(); ++j) {
      if (i != j && !cross[i][j].empty()) {
        return true;
      }
    }
  }
  return false;
}

bool GameProblem::autonomous() const {
  if (!A.is_constant()) {
    return false;
  }
  for (const auto& p : players) {
    if (!p.B.is_constant() || !p.R.is_constant() || !p.Q.is_constant()) {
      return false;
    }
  }
  for (const auto& row : cross) {
    for (const auto& m : row) {
      if (!m.empty() && !m.is_constant()) {
        return false;
      }
    }
  }
  return true;
}

void validate(const GameProblem& game) {
  if (game.players.empty()) {
    throw InputError("GameProblem: at least one player required");
  }
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    try {
      validate(player_problem(game, i));
    } catch (const InputError& e) {
      throw InputError(player_name(i) + ": " + e.what());
    } catch (const DimensionError& e) {
      throw DimensionError(player_name(i) + ": " + e.what());
    }
  }
  if (!game.zero_sum()) {
    return;
  }
  if (game.players.size() != 2) {
    throw InputError("GameProblem: the zero-sum mode needs exactly two players");
  }
  if (!has_cross(game, 0, 1) || !has_cross(game, 1, 0)) {
    throw InputError("GameProblem: the zero-sum mode needs both cross weights R_12 and R_21");
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const std::size_t j = 1 - i;
    const TimeMatrix& r = game.cross[i][j];
    const Index rj = game.players[j].B.cols();
    if (r.rows() != rj || r.cols() != rj) {
      throw DimensionError("GameProblem: cross weight R_" + std::to_string(i + 1) +
                           std::to_string(j + 1) + " must match player " +
                           std::to_string(j + 1) + "'s control dimension");
    }
    for (int k = 0; k <= 8; ++k) {
      const double t = game.t0 + (game.T - game.t0) * k / 8.0;
      const Matrix m = r(t);
      if (matfun::symmetry_defect(m) > 1e-12 * std::max(1.0, max_norm(m)) ||
          !(matfun::min_eigenvalue_sym(m) > 0.0)) {
        std::ostringstream os;
        os << "GameProblem: cross weight R_" << i + 1 << j + 1
           << " is not symmetric positive definite at t = " << t;
        throw InputError(os.str());
      }
    }
  }
}

Matrix game_block_matrix(const GameProblem& game, double t) {
  return CoupledSystem::assemble(game_coefficients(game, t));
}

CoupledSystem to_coupled(const GameProblem& game) {
  validate(game);
  if (game.zero_sum()) {
    throw MisuseError(
        "to_coupled: zero-sum games have no linear formulation, use solve_zero_sum");
  }
  std::vector<Matrix> terminal;
  for (const auto& p : game.players) {
    terminal.push_back(p.QT);
  }
  return CoupledSystem([game](double t) { return game_coefficients(game, t); },
                       game.state_dim(), game.players.size(), game.autonomous(),
                       std::move(terminal), game.x0, game.t0, game.T);
}

GameFlow split_game_flow(const Matrix& v, Index state_dim, double t) {
  if (v.cols() != state_dim || v.rows() % state_dim != 0 || v.rows() < 2 * state_dim) {
    throw DimensionError("split_game_flow: stacked flow has wrong shape");
  }
  GameFlow f;
  f.U = v.topRows(state_dim);
  for (Index r = state_dim; r < v.rows(); r += state_dim) {
    f.V.emplace_back(v.middleRows(r, state_dim));
  }
  f.t = t;
  return f;
}

Trajectory solve_game(const GameProblem& game, const SolveOptions& opts) {
  if (game.zero_sum()) {
    throw MisuseError("solve_game: zero-sum game given, use solve_zero_sum");
  }
  return solve(to_coupled(game), opts);
}

std::pair<Matrix, Matrix> zero_sum_rhs(const GameProblem& game, double t, const Matrix& P1,
                                       const Matrix& P2) {
  if (!game.zero_sum() || game.players.size() != 2 || !has_cross(game, 0, 1) ||
      !has_cross(game, 1, 0)) {
    throw MisuseError("zero_sum_rhs: game is not a two-player zero-sum game");
  }
  const Index n = game.state_dim();
  if (P1.rows() != n || P1.cols() != n || P2.rows() != n || P2.cols() != n) {
    throw DimensionError("zero_sum_rhs: gains must be n x n");
  }
  const ZeroSumData d = zero_sum_data(game, t);
  const PairState p{P1, P2};
  const PairState q = quadratic_terms(d, p, p);
  const Matrix at = d.A.transpose();
  return {-d.Q1 - at * P1 - P1 * d.A + q.P1, -d.Q2 - at * P2 - P2 * d.A + q.P2};
}

Trajectory solve_zero_sum(const GameProblem& game, const ZeroSumOptions& opts) {
  validate(game);
  if (!game.zero_sum()) {
    throw MisuseError("solve_zero_sum: game has no cross weights, use solve_game");
  }
  if (opts.steps_backward < 1 || opts.steps_forward < 1) {
    throw InputError("solve_zero_sum: step counts must be at least 1");
  }
  const std::vector<double> alphas = opts.alphas.empty() ? triple_jump_alphas() : opts.alphas;
  double alpha_sum = 0.0;
  for (double a : alphas) {
    alpha_sum += a;
  }
  if (std::abs(alpha_sum - 1.0) > 1e-14) {
    std::ostringstream os;
    os.precision(17);
    os << "solve_zero_sum: composition weights sum to " << alpha_sum << ", expected 1";
    throw ConfigError(os.str());
  }
  const Index n = game.state_dim();

  // Backward: two Richardson levels on k, 2k, 4k steps.
  const std::size_t k = opts.steps_backward;
  const Matrix y1 = backward_sweep(game, k);
  const Matrix y2 = backward_sweep(game, 2 * k);
  const Matrix y4 = backward_sweep(game, 4 * k);
  const double d1 = max_norm(y2 - y1);
  const double d2 = max_norm(y4 - y2);
  const double floor = 1e-13 * std::max(1.0, max_norm(y4));
  if (d2 >= d1 && d1 > floor) {
    std::ostringstream os;
    os << "solve_zero_sum: step-halving differences do not decrease (" << d1 << ", " << d2
       << "); increase steps_backward";
    throw ConvergenceError(os.str());
  }
  const Matrix r1 = (4.0 * y2 - y1) / 3.0;
  const Matrix r2 = (4.0 * y4 - y2) / 3.0;
  const Matrix best = (16.0 * r2 - r1) / 15.0;

  Trajectory traj;
  traj.backward_steps = 4 * k;
  traj.backward_error = max_norm(best - r2);

  // Forward: composition of a Strang step for x around the base map.
  PairState p = unstack(best, n);
  Vector x = game.x0;
  const double h = (game.T - game.t0) / static_cast<double>(opts.steps_forward);
  auto record = [&](double t) {
    const ZeroSumData d = zero_sum_data(game, t);
    traj.samples.push_back(make_sample(t, x, {p.P1, p.P2}, {d.F1, d.F2}));
  };
  record(game.t0);
  for (std::size_t s = 0; s < opts.steps_forward; ++s) {
    double t = game.t0 + static_cast<double>(s) * h;
    for (double alpha : alphas) {
      const double tau = alpha * h;
      x = matfun::expm(0.5 * tau * closed_loop(zero_sum_data(game, t), p)) * x;
      p = base_map(game, t, tau, p);
      t += tau;
      x = matfun::expm(0.5 * tau * closed_loop(zero_sum_data(game, t), p)) * x;
    }
    record(s + 1 == opts.steps_forward ? game.T
                                       : game.t0 + static_cast<double>(s + 1) * h);
  }
  traj.evaluations = opts.steps_forward * alphas.size();
  return traj;
}

}  // namespace lqsplit
