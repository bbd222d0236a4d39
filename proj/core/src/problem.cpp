#include "lqsplit/problem.hpp"

#include <sstream>
#include <string>
#include <utility>

#include "lqsplit/errors.hpp"

namespace lqsplit {

namespace {

constexpr double kPsdTolerance = 1e-12;
constexpr double kSymmetryTolerance = 1e-12;

std::string at_time(std::string_view what, double t) {
  std::ostringstream os;
  os << what << " at t = " << t;
  return os.str();
}

void require_symmetric_psd(const Matrix& m, std::string_view what, bool strict) {
  const double scale = std::max(1.0, m.cwiseAbs().rowwise().sum().maxCoeff());
  if (matfun::symmetry_defect(m) > kSymmetryTolerance * scale) {
    throw InputError(std::string(what) + " is not symmetric");
  }
  const double lambda = matfun::min_eigenvalue_sym(m);
  if (strict ? !(lambda > 0.0) : lambda < -kPsdTolerance * scale) {
    throw InputError(std::string(what) +
                     (strict ? " is not positive definite" : " is not positive semidefinite"));
  }
}

void require_shape(const Matrix& m, Index rows, Index cols, std::string_view what) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << what << ": expected " << rows << "x" << cols << ", got " << m.rows() << "x"
       << m.cols();
    throw DimensionError(os.str());
  }
}

}  // namespace

TimeMatrix::TimeMatrix(Evaluator evaluator, Index rows, Index cols, bool constant)
    : evaluator_(std::move(evaluator)), rows_(rows), cols_(cols), constant_(constant) {
  if (!evaluator_) {
    throw InputError("TimeMatrix: empty evaluator");
  }
  if (rows < 1 || cols < 1) {
    throw DimensionError("TimeMatrix: dimensions must be positive");
  }
}

TimeMatrix TimeMatrix::constant(Matrix value) {
  matfun::require_finite(value, "TimeMatrix::constant");
  const Index r = value.rows();
  const Index c = value.cols();
  return TimeMatrix([m = std::move(value)](double) { return m; }, r, c, true);
}

Matrix TimeMatrix::operator()(double t) const {
  if (!evaluator_) {
    throw MisuseError("TimeMatrix: evaluated without an evaluator");
  }
  Matrix m = evaluator_(t);
  if (m.rows() != rows_ || m.cols() != cols_) {
    std::ostringstream os;
    os << "TimeMatrix: evaluator returned " << m.rows() << "x" << m.cols() << " at t = " << t
       << ", declared " << rows_ << "x" << cols_;
    throw DimensionError(os.str());
  }
  if (!m.allFinite()) {
    throw InputError(at_time("TimeMatrix: non-finite value", t));
  }
  return m;
}

void validate(const LQProblem& prob, std::span<const double> nodes) {
  if (prob.A.empty() || prob.B.empty() || prob.Q.empty() || prob.R.empty()) {
    throw InputError("LQProblem: A, B, Q and R must all be set");
  }
  if (!(prob.t0 < prob.T)) {
    throw InputError("LQProblem: requires t0 < T");
  }
  const Index n = prob.A.rows();
  const Index r = prob.B.cols();
  if (prob.A.cols() != n || prob.B.rows() != n || prob.Q.rows() != n || prob.Q.cols() != n ||
      prob.R.rows() != r || prob.R.cols() != r) {
    throw DimensionError("LQProblem: inconsistent coefficient dimensions");
  }
  require_shape(prob.QT, n, n, "LQProblem: Q_T");
  if (prob.x0.size() != n) {
    throw DimensionError("LQProblem: x0 has wrong length");
  }
  matfun::require_finite(prob.QT, "LQProblem: Q_T");
  require_symmetric_psd(prob.QT, "LQProblem: Q_T", false);

  const double first = nodes.empty() ? prob.t0 : nodes.front();
  const Matrix a0 = prob.A(first);
  const Matrix b0 = prob.B(first);
  const Matrix q0 = prob.Q(first);
  const Matrix r0 = prob.R(first);
  for (double t : nodes) {
    const Matrix q = prob.Q(t);
    const Matrix rr = prob.R(t);
    require_symmetric_psd(q, at_time("LQProblem: Q", t), false);
    require_symmetric_psd(rr, at_time("LQProblem: R", t), true);
    if ((prob.A.is_constant() && prob.A(t) != a0) || (prob.B.is_constant() && prob.B(t) != b0) ||
        (prob.Q.is_constant() && q != q0) || (prob.R.is_constant() && rr != r0)) {
      throw InputError(at_time("LQProblem: coefficient flagged constant changes", t));
    }
  }
}

void validate(const LQProblem& prob) {
  std::vector<double> nodes(9);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i] = prob.t0 + (prob.T - prob.t0) * static_cast<double>(i) / 8.0;
  }
  validate(prob, nodes);
}

void feedback_blocks(const Matrix& B, const Matrix& R, double t, std::string_view who, Matrix& S,
                     Matrix& feedback) {
  try {
    feedback = matfun::solve(R, B.transpose(), who);
  } catch (const SingularityError&) {
    throw InputError(at_time(std::string(who) + ": R is singular", t));
  }
  S = matfun::symmetrize(B * feedback);
}

Matrix s_matrix(const LQProblem& prob, double t) {
  Matrix S;
  Matrix feedback;
  feedback_blocks(prob.B(t), prob.R(t), t, "s_matrix", S, feedback);
  return S;
}

Matrix hamiltonian_matrix(const LQProblem& prob, double t) {
  const Index n = prob.state_dim();
  const Matrix A = prob.A(t);
  Matrix k(2 * n, 2 * n);
  k << A, -s_matrix(prob, t), -prob.Q(t), -A.transpose();
  return k;
}

Matrix closed_loop_matrix(const LQProblem& prob, double t, const Matrix& P) {
  const Index n = prob.state_dim();
  if (P.rows() != n || P.cols() != n) {
    throw InputError("closed_loop_matrix: P must be n x n");
  }
  return prob.A(t) - s_matrix(prob, t) * P;
}

CoupledSystem::CoupledSystem(Evaluator evaluator, Index state_dim, std::size_t players,
                             bool autonomous, std::vector<Matrix> terminal_weights, Vector x0,
                             double t0, double T)
    : evaluator_(std::move(evaluator)),
      n_(state_dim),
      players_(players),
      autonomous_(autonomous),
      terminal_(std::move(terminal_weights)),
      x0_(std::move(x0)),
      t0_(t0),
      T_(T) {
  if (players_ == 0 || n_ < 1) {
    throw DimensionError("CoupledSystem: needs at least one player and a non-empty state");
  }
  if (terminal_.size() != players_) {
    throw DimensionError("CoupledSystem: one terminal weight per player required");
  }
  for (const auto& qt : terminal_) {
    require_shape(qt, n_, n_, "CoupledSystem: terminal weight");
  }
  if (x0_.size() != n_) {
    throw DimensionError("CoupledSystem: x0 has wrong length");
  }
  if (!(t0_ < T_)) {
    throw InputError("CoupledSystem: requires t0 < T");
  }
  if (autonomous_) {
    frozen_ = std::make_shared<const Coefficients>(evaluator_(t0_));
  }
}

Coefficients CoupledSystem::coefficients(double t) const {
  if (frozen_) {
    return *frozen_;
  }
  return evaluator_(t);
}

Matrix CoupledSystem::assemble(const Coefficients& c) {
  const Index n = c.A.rows();
  const auto players = static_cast<Index>(c.S.size());
  Matrix k = Matrix::Zero((players + 1) * n, (players + 1) * n);
  k.topLeftCorner(n, n) = c.A;
  const Matrix at = c.A.transpose();
  for (Index i = 0; i < players; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    k.block(0, (i + 1) * n, n, n) = -c.S[idx];
    k.block((i + 1) * n, 0, n, n) = -c.Q[idx];
    k.block((i + 1) * n, (i + 1) * n, n, n) = -at;
  }
  return k;
}

Matrix CoupledSystem::coefficient_matrix(double t) const { return assemble(coefficients(t)); }

Matrix CoupledSystem::terminal_condition() const {
  Matrix y(stacked_rows(), n_);
  y.topRows(n_).setIdentity();
  for (std::size_t i = 0; i < players_; ++i) {
    y.middleRows(static_cast<Index>(i + 1) * n_, n_) = terminal_[i];
  }
  return y;
}

std::vector<Matrix> CoupledSystem::gains(const Matrix& v) const {
  if (v.rows() != stacked_rows() || v.cols() != n_) {
    throw DimensionError("CoupledSystem::gains: stacked flow has wrong shape");
  }
  // P = V U^-1  <=>  U^T P^T = V^T.
  const Matrix stacked =
      matfun::solve(v.topRows(n_).transpose(), v.bottomRows(v.rows() - n_).transpose(),
                    "gain: U")
          .transpose();
  std::vector<Matrix> out;
  out.reserve(players_);
  for (std::size_t i = 0; i < players_; ++i) {
    out.emplace_back(stacked.middleRows(static_cast<Index>(i) * n_, n_));
  }
  return out;
}

Matrix CoupledSystem::closed_loop(const Coefficients& c, const Matrix& v) const {
  Matrix sv = Matrix::Zero(n_, n_);
  for (std::size_t i = 0; i < players_; ++i) {
    sv += c.S[i] * v.middleRows(static_cast<Index>(i + 1) * n_, n_);
  }
  // (sum S_i V_i) U^-1 = (U^-T (sum S_i V_i)^T)^T
  return c.A - matfun::solve(v.topRows(n_).transpose(), sv.transpose(), "closed loop: U")
                   .transpose();
}

std::vector<Vector> CoupledSystem::controls(const Coefficients& c, const Matrix& v,
                                            const Vector& x) const {
  const auto p = gains(v);
  std::vector<Vector> u;
  u.reserve(players_);
  for (std::size_t i = 0; i < players_; ++i) {
    u.emplace_back(-(c.feedback[i] * (p[i] * x)));
  }
  return u;
}

CoupledSystem to_coupled(const LQProblem& prob) {
  validate(prob);
  auto evaluator = [prob](double t) {
    Coefficients c;
    c.A = prob.A(t);
    Matrix S;
    Matrix feedback;
    feedback_blocks(prob.B(t), prob.R(t), t, "LQProblem", S, feedback);
    c.S = {std::move(S)};
    c.Q = {prob.Q(t)};
    c.feedback = {std::move(feedback)};
    return c;
  };
  return CoupledSystem(std::move(evaluator), prob.state_dim(), 1, prob.autonomous(), {prob.QT},
                       prob.x0, prob.t0, prob.T);
}

}  // namespace lqsplit
