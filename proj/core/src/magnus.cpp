#include "lqsplit/magnus.hpp"

#include "lqsplit/errors.hpp"

namespace lqsplit::magnus {

Matrix cf4_step(const LinearFlowProblem& prob, double t, double h, const Matrix& y,
                Counts* counts) {
  if (h == 0.0) {
    throw InputError("cf4_step: step size must be nonzero");
  }
  const Index d = prob.M.rows();
  if (prob.M.cols() != d || y.rows() != d) {
    throw DimensionError("cf4_step: coefficient and state dimensions disagree");
  }
  const Matrix m0 = prob.M(t);
  const Matrix mh = prob.M(t + 0.5 * h);
  const Matrix m1 = prob.M(t + h);
  const double w = h / 12.0;
  const Matrix first = matfun::expm(w * (3.0 * m0 + 4.0 * mh - m1));
  const Matrix second = matfun::expm(w * (-m0 + 4.0 * mh + 3.0 * m1));
  if (counts != nullptr) {
    counts->samples += 3;
    counts->exponentials += 2;
  }
  return second * (first * y);
}

Matrix integrate(const LinearFlowProblem& prob, double t0, double t1, std::size_t steps,
                 const Matrix& y0, Counts* counts) {
  if (steps < 1) {
    throw InputError("magnus::integrate: steps must be at least 1");
  }
  if ((prob.direction == Direction::backward && t1 > t0) ||
      (prob.direction == Direction::forward && t1 < t0)) {
    throw MisuseError("magnus::integrate: interval orientation contradicts the declared direction");
  }
  const double h = (t1 - t0) / static_cast<double>(steps);
  Matrix y = y0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    y = cf4_step(prob, t, h, y, counts);
  }
  return y;
}

}  // namespace lqsplit::magnus
