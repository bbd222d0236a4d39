#include "lqsplit/riccati.hpp"

#include <sstream>
#include <string>

#include "lqsplit/errors.hpp"
#include "lqsplit/magnus.hpp"

namespace lqsplit {

double RiccatiFlow::rcond() const { return matfun::reciprocal_condition(U); }

namespace riccati {

namespace {

constexpr std::size_t kMaxBackwardSteps = std::size_t{1} << 18;

void require_regular(const Matrix& u, double t) {
  if (matfun::reciprocal_condition(u) < matfun::kSingularRcond) {
    std::ostringstream os;
    os << "Riccati flow: U is singular at t = " << t;
    throw SingularityError(os.str());
  }
}

magnus::LinearFlowProblem backward_flow(const CoupledSystem& sys) {
  const Index d = sys.stacked_rows();
  return {TimeMatrix([&sys](double t) { return sys.coefficient_matrix(t); }, d, d,
                     sys.autonomous()),
          magnus::Direction::backward};
}

}  // namespace

RiccatiFlow split_flow(const Matrix& v, Index state_dim, double t) {
  return {v.topRows(state_dim), v.bottomRows(v.rows() - state_dim), t};
}

Matrix backward_autonomous(const CoupledSystem& sys) {
  if (!sys.autonomous()) {
    throw MisuseError(
        "backward_autonomous: coefficients are time dependent, use backward_nonautonomous");
  }
  const Matrix v =
      matfun::expm((sys.t0() - sys.T()) * sys.coefficient_matrix(sys.T())) * sys.terminal_condition();
  require_regular(v.topRows(sys.state_dim()), sys.t0());
  return v;
}

Matrix backward_nonautonomous(const CoupledSystem& sys, std::size_t steps) {
  if (steps < 1) {
    throw InputError("backward_nonautonomous: steps must be at least 1");
  }
  const auto flow = backward_flow(sys);
  const double h = (sys.t0() - sys.T()) / static_cast<double>(steps);
  Matrix v = sys.terminal_condition();
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = sys.T() + static_cast<double>(k) * h;
    v = magnus::cf4_step(flow, t, h, v);
    require_regular(v.topRows(sys.state_dim()), t + h);
  }
  return v;
}

BackwardResult backward_pass(const CoupledSystem& sys, double tolerance,
                             std::size_t initial_steps) {
  if (sys.autonomous()) {
    return {backward_autonomous(sys), 0.0, 0};
  }
  std::size_t k = std::max<std::size_t>(1, initial_steps);
  Matrix coarse = backward_nonautonomous(sys, k);
  for (;;) {
    const Matrix fine = backward_nonautonomous(sys, 2 * k);
    const Matrix diff = (fine - coarse) / 15.0;
    const double scale = std::max(1.0, fine.cwiseAbs().maxCoeff());
    const double estimate = diff.cwiseAbs().maxCoeff() / scale;
    if (estimate <= tolerance || 4 * k > kMaxBackwardSteps) {
      if (estimate > tolerance) {
        std::ostringstream os;
        os << "backward_pass: estimate " << estimate << " above tolerance " << tolerance
           << " at " << 2 * k << " steps";
        throw ConvergenceError(os.str());
      }
      return {fine + diff, estimate, 2 * k};
    }
    coarse = fine;
    k *= 2;
  }
}

RiccatiFlow backward_autonomous(const LQProblem& prob) {
  const CoupledSystem sys = to_coupled(prob);
  return split_flow(backward_autonomous(sys), prob.state_dim(), prob.t0);
}

RiccatiFlow backward_nonautonomous(const LQProblem& prob, std::size_t steps) {
  const CoupledSystem sys = to_coupled(prob);
  return split_flow(backward_nonautonomous(sys, steps), prob.state_dim(), prob.t0);
}

Gain gain(const RiccatiFlow& flow) {
  matfun::require_square(flow.U, "gain: U");
  if (flow.V.rows() != flow.U.rows() || flow.V.cols() != flow.U.cols()) {
    throw DimensionError("gain: V must have the shape of U");
  }
  require_regular(flow.U, flow.t);
  const Matrix raw = matfun::solve(flow.U.transpose(), flow.V.transpose(), "gain: U").transpose();
  return {matfun::symmetrize(raw), matfun::symmetry_defect(raw)};
}

Vector control(const LQProblem& prob, double t, const RiccatiFlow& flow, const Vector& x) {
  const Gain g = gain(flow);
  if (x.size() != g.P.rows()) {
    throw DimensionError("control: state has wrong length");
  }
  Matrix S;
  Matrix feedback;
  feedback_blocks(prob.B(t), prob.R(t), t, "control", S, feedback);
  return -(feedback * (g.P * x));
}

}  // namespace riccati
}  // namespace lqsplit
