#include "lqsplit/trajectory.hpp"

#include <algorithm>
#include <limits>

#include "lqsplit/errors.hpp"

namespace lqsplit {

const Sample& Trajectory::initial() const {
  if (samples.empty()) {
    throw MisuseError("Trajectory: no samples");
  }
  return samples.front();
}

const Sample& Trajectory::final() const {
  if (samples.empty()) {
    throw MisuseError("Trajectory: no samples");
  }
  return samples.back();
}

double Trajectory::min_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    m = std::min(m, s.min_eigenvalue);
  }
  return m;
}

double Trajectory::max_symmetry_defect() const {
  double m = 0.0;
  for (const auto& s : samples) {
    m = std::max(m, s.symmetry_defect);
  }
  return m;
}

double Trajectory::terminal_defect(const std::vector<Matrix>& terminal_weights) const {
  const auto& last = final();
  if (last.gains.size() != terminal_weights.size()) {
    throw DimensionError("Trajectory::terminal_defect: player count mismatch");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < last.gains.size(); ++i) {
    d = std::max(d, (last.gains[i] - terminal_weights[i]).cwiseAbs().rowwise().sum().maxCoeff());
  }
  return d;
}

Sample make_sample(double t, const Vector& x, const std::vector<Matrix>& raw_gains,
                   const std::vector<Matrix>& feedback) {
  Sample s;
  s.t = t;
  s.x = x;
  s.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < raw_gains.size(); ++i) {
    const Matrix& raw = raw_gains[i];
    s.symmetry_defect = std::max(s.symmetry_defect, matfun::symmetry_defect(raw));
    Matrix p = matfun::symmetrize(raw);
    s.min_eigenvalue = std::min(s.min_eigenvalue, matfun::min_eigenvalue_sym(p));
    s.controls.emplace_back(-(feedback[i] * (p * x)));
    s.gains.push_back(std::move(p));
  }
  return s;
}

Sample make_sample(const CoupledSystem& sys, double t, const Matrix& v, const Vector& x) {
  return make_sample(t, x, sys.gains(v), sys.coefficients(t).feedback);
}

}  // namespace lqsplit
