#include "lqsplit/splitting.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>

#include "lqsplit/errors.hpp"

namespace lqsplit {

namespace {

constexpr double kAlphaSumTolerance = 1e-14;

bool same_time(double a, double b) {
  return std::abs(a - b) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                std::max({1.0, std::abs(a), std::abs(b)});
}

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

SplittingScheme make_sp1() {
  SplittingScheme s;
  s.name = "sp1";
  s.a = {1.0};
  s.b = {1.0};
  s.order = 1;
  s.stages = 1;
  return s;
}

SplittingScheme make_sp2() {
  SplittingScheme s;
  s.name = "sp2";
  s.a = {0.5, 0.5};
  s.b = {1.0, 0.0};
  s.order = 2;
  s.stages = 1;
  s.symmetric = true;
  s.fsal = true;
  return s;
}

SplittingScheme make_sp4() {
  const double b1 = 0.0792036964311957;
  const double b2 = 0.353172906049774;
  const double b3 = -0.0420650803577195;
  const double b4 = 1.0 - 2.0 * (b1 + b2 + b3);
  const double a2 = 0.209515106613362;
  const double a3 = -0.143851773179818;
  const double a4 = 0.5 - (a2 + a3);
  SplittingScheme s;
  s.name = "sp4";
  s.a = {0.0, a2, a3, a4, a4, a3, a2};
  s.b = {b1, b2, b3, b4, b3, b2, b1};
  s.order = 4;
  s.stages = 6;
  s.symmetric = true;
  s.fsal = true;
  return s;
}

SplittingScheme make_sp6() {
  const double a1 = 0.0502627644003922;
  const double a2 = 0.413514300428344;
  const double a3 = 0.0450798897943977;
  const double a4 = -0.188054853819569;
  const double a5 = 0.541960678450780;
  const double a6 = 1.0 - 2.0 * (a1 + a2 + a3 + a4 + a5);
  const double b1 = 0.148816447901042;
  const double b2 = -0.132385865767784;
  const double b3 = 0.067307604692185;
  const double b4 = 0.432666402578175;
  const double b5 = 0.5 - (b1 + b2 + b3 + b4);
  SplittingScheme s;
  s.name = "sp6";
  s.a = {a1, a2, a3, a4, a5, a6, a5, a4, a3, a2, a1};
  s.b = {b1, b2, b3, b4, b5, b5, b4, b3, b2, b1, 0.0};
  s.order = 6;
  s.stages = 10;
  s.symmetric = true;
  s.fsal = true;
  return s;
}

SplittingScheme make_ni42() {
  const double a1 = (3.0 - std::sqrt(3.0)) / 6.0;
  SplittingScheme s;
  s.name = "ni42";
  s.a = {a1, 1.0 - 2.0 * a1, a1};
  s.b = {0.5, 0.5, 0.0};
  s.order = 2;
  s.limit_order = 4;
  s.stages = 2;
  s.symmetric = true;
  s.kind = SchemeKind::near_integrable;
  return s;
}

SplittingScheme make_ni84() {
  const double a1 = 0.07534696026989288842;
  const double a2 = 0.5179168546882567823;
  const double a3 = 0.5 - (a1 + a2);
  const double b1 = 0.19022593937367661925;
  const double b2 = 0.84652407044352625706;
  const double b3 = 1.0 - 2.0 * (b1 + b2);
  SplittingScheme s;
  s.name = "ni84";
  s.a = {a1, a2, a3, a3, a2, a1};
  s.b = {b1, b2, b3, b2, b1, 0.0};
  s.order = 4;
  s.limit_order = 8;
  s.stages = 5;
  s.symmetric = true;
  s.kind = SchemeKind::near_integrable;
  return s;
}

SplittingScheme make_s2c4() {
  SplittingScheme s;
  s.name = "s2c4";
  s.alphas = triple_jump_alphas();
  // Unrolled as a/b pairs: each base step contributes a/2, b, a/2 and
  // neighbouring half steps merge.
  const auto& al = s.alphas;
  s.a.push_back(0.5 * al.front());
  for (std::size_t i = 0; i + 1 < al.size(); ++i) {
    s.a.push_back(0.5 * (al[i] + al[i + 1]));
  }
  s.a.push_back(0.5 * al.back());
  s.b = al;
  s.b.push_back(0.0);
  s.order = 4;
  s.stages = static_cast<int>(al.size());
  s.symmetric = true;
  s.kind = SchemeKind::composition;
  return s;
}

}  // namespace

std::vector<double> triple_jump_alphas() {
  const double c = std::cbrt(4.0);
  const double a1 = 1.0 / (4.0 - c);
  const double a2 = -c / (4.0 - c);
  return {a1, a1, a2, a1, a1};
}

const std::vector<SplittingScheme>& builtin_schemes() {
  static const std::vector<SplittingScheme> schemes = {
      make_sp1(), make_sp2(), make_sp4(), make_sp6(), make_ni42(), make_ni84(), make_s2c4(),
  };
  return schemes;
}

const SplittingScheme& find_scheme(std::string_view name) {
  const std::string key = lower(name);
  for (const auto& s : builtin_schemes()) {
    if (s.name == key) {
      return s;
    }
  }
  throw ConfigError("unknown splitting scheme '" + std::string(name) + "'");
}

bool is_palindromic(const SplittingScheme& scheme) {
  std::vector<std::pair<char, double>> seq;
  for (std::size_t i = 0; i < scheme.pairs(); ++i) {
    if (scheme.a[i] != 0.0) {
      seq.emplace_back('a', scheme.a[i]);
    }
    if (scheme.b[i] != 0.0) {
      seq.emplace_back('b', scheme.b[i]);
    }
  }
  for (std::size_t i = 0, j = seq.size(); i < j--; ++i) {
    if (seq[i].first != seq[j].first ||
        std::abs(seq[i].second - seq[j].second) > 1e-15) {
      return false;
    }
  }
  return true;
}

RiccatiFlow ExtendedState::flow(Index state_dim) const {
  return riccati::split_flow(v, state_dim, t1);
}

SplittingIntegrator::SplittingIntegrator(const CoupledSystem& sys, SplittingScheme scheme)
    : sys_(sys), scheme_(std::move(scheme)), cached_h_(std::numeric_limits<double>::quiet_NaN()) {
  if (scheme_.kind != SchemeKind::general) {
    throw MisuseError("SplittingIntegrator: scheme '" + scheme_.name +
                      "' needs its dedicated integrator");
  }
  if (scheme_.a.size() != scheme_.b.size() || scheme_.a.empty()) {
    throw ConfigError("SplittingIntegrator: scheme '" + scheme_.name +
                      "' needs matching, non-empty coefficient lists");
  }
}

const Matrix& SplittingIntegrator::state_map(double scaled_step, double t1, const Matrix& v) {
  if (x_memo_.valid && x_memo_.scaled_step == scaled_step && same_time(x_memo_.time, t1) &&
      same_matrix(x_memo_.v, v)) {
    return x_memo_.map;
  }
  const Coefficients c = sys_.coefficients(t1);
  x_memo_.map = matfun::expm(scaled_step * sys_.closed_loop(c, v));
  x_memo_.scaled_step = scaled_step;
  x_memo_.time = t1;
  x_memo_.v = v;
  x_memo_.valid = true;
  ++evaluations_;
  return x_memo_.map;
}

const Matrix& SplittingIntegrator::riccati_map(std::size_t pair, double scaled_step, double t2,
                                               bool autonomous) {
  if (autonomous) {
    return cached_maps_[pair];
  }
  if (v_memo_.valid && v_memo_.scaled_step == scaled_step && same_time(v_memo_.time, t2)) {
    return v_memo_.map;
  }
  v_memo_.map = matfun::expm(scaled_step * sys_.coefficient_matrix(t2));
  v_memo_.scaled_step = scaled_step;
  v_memo_.time = t2;
  v_memo_.valid = true;
  return v_memo_.map;
}

ExtendedState SplittingIntegrator::advance(double h, const ExtendedState& s, bool autonomous) {
  if (s.v.rows() != sys_.stacked_rows() || s.v.cols() != sys_.state_dim() ||
      s.x.size() != sys_.state_dim()) {
    throw DimensionError("SplittingIntegrator: state does not match the system");
  }
  if (h == 0.0) {
    return s;
  }
  if (autonomous && h != cached_h_) {
    const Matrix k = sys_.coefficient_matrix(s.t2);
    cached_maps_.assign(scheme_.pairs(), Matrix());
    for (std::size_t i = 0; i < scheme_.pairs(); ++i) {
      if (scheme_.b[i] != 0.0) {
        cached_maps_[i] = matfun::expm((scheme_.b[i] * h) * k);
      }
    }
    cached_h_ = h;
  }

  ExtendedState out = s;
  for (std::size_t i = 0; i < scheme_.pairs(); ++i) {
    const double a = scheme_.a[i];
    const double b = scheme_.b[i];
    try {
      if (a != 0.0) {
        out.x = state_map(a * h, out.t1, out.v) * out.x;
      }
      out.t2 += a * h;
      if (b != 0.0) {
        out.v = riccati_map(i, b * h, out.t2, autonomous) * out.v;
      }
      out.t1 += b * h;
    } catch (const SingularityError& e) {
      std::ostringstream os;
      os << scheme_.name << " stage " << i + 1 << ": " << e.what();
      throw SingularityError(os.str());
    }
  }
  out.t1 = s.t1 + h;
  out.t2 = out.t1;
  return out;
}

ExtendedState SplittingIntegrator::step_autonomous(double h, const ExtendedState& s) {
  if (!sys_.autonomous()) {
    throw MisuseError("step_autonomous: coefficients are time dependent");
  }
  return advance(h, s, true);
}

ExtendedState SplittingIntegrator::step_nonautonomous(double h, const ExtendedState& s) {
  return advance(h, s, false);
}

ExtendedState SplittingIntegrator::step(double h, const ExtendedState& s) {
  return advance(h, s, sys_.autonomous());
}

ExtendedState s2_step(double h, const ExtendedState& s, const CoupledSystem& sys) {
  const double half = 0.5 * h;
  ExtendedState out = s;
  out.x = matfun::expm(half * sys.closed_loop(sys.coefficients(out.t1), out.v)) * out.x;
  out.t2 += half;
  out.v = matfun::pade2(sys.coefficient_matrix(out.t2), h) * out.v;
  out.t1 += h;
  out.x = matfun::expm(half * sys.closed_loop(sys.coefficients(out.t1), out.v)) * out.x;
  out.t2 += half;
  return out;
}

StepMap compose(StepMap base, std::vector<double> alphas) {
  if (!base) {
    throw MisuseError("compose: empty base map");
  }
  if (alphas.empty()) {
    throw ConfigError("compose: no composition weights");
  }
  const double sum = std::accumulate(alphas.begin(), alphas.end(), 0.0);
  if (std::abs(sum - 1.0) > kAlphaSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "compose: weights sum to " << sum << ", expected 1";
    throw ConfigError(os.str());
  }
  return [base = std::move(base), alphas = std::move(alphas)](double h, const ExtendedState& s) {
    ExtendedState out = s;
    for (double alpha : alphas) {
      out = base(alpha * h, out);
    }
    out.t1 = s.t1 + h;
    out.t2 = out.t1;
    return out;
  };
}

NearIntegrableIntegrator::NearIntegrableIntegrator(const CoupledSystem& sys,
                                                   SplittingScheme scheme,
                                                   std::optional<Matrix> dominant)
    : sys_(sys), scheme_(std::move(scheme)) {
  if (scheme_.kind != SchemeKind::near_integrable) {
    throw MisuseError("NearIntegrableIntegrator: scheme '" + scheme_.name +
                      "' is not a near-integrable splitting");
  }
  if (!dominant) {
    throw MisuseError("NearIntegrableIntegrator: no dominant constant A designated");
  }
  dominant_ = std::move(*dominant);
  const Index n = sys_.state_dim();
  if (dominant_.rows() != n || dominant_.cols() != n) {
    throw DimensionError("NearIntegrableIntegrator: dominant matrix must be n x n");
  }
  matfun::require_finite(dominant_, "NearIntegrableIntegrator: dominant matrix");
  dominant_block_ = Matrix::Zero(sys_.stacked_rows(), sys_.stacked_rows());
  dominant_block_.topLeftCorner(n, n) = dominant_;
  for (std::size_t i = 0; i < sys_.players(); ++i) {
    const Index off = static_cast<Index>(i + 1) * n;
    dominant_block_.block(off, off, n, n) = -dominant_.transpose();
  }
}

const NearIntegrableIntegrator::NodalMaps& NearIntegrableIntegrator::nodal(double tau) {
  for (const auto& m : nodal_) {
    if (m.tau == tau) {
      return m;
    }
  }
  NodalMaps m;
  m.tau = tau;
  m.forward = matfun::expm(tau * dominant_);
  m.half = matfun::expm(-0.5 * tau * dominant_);
  m.full = matfun::expm(-tau * dominant_);
  nodal_.push_back(std::move(m));
  return nodal_.back();
}

Matrix NearIntegrableIntegrator::state_map(double tau, double t, const Matrix& v) {
  // Along the dominant flow V_i(s) U(s)^-1 = E(s)^T P_i E(s), E(s) = exp(-s A).
  const NodalMaps& maps = nodal(tau);
  const auto gains = sys_.gains(v);
  const Index n = sys_.state_dim();
  auto sample = [&](double c, const Matrix* e) {
    const Coefficients k = sys_.coefficients(t + c * tau);
    Matrix m = k.A;
    for (std::size_t i = 0; i < gains.size(); ++i) {
      m -= e == nullptr ? Matrix(k.S[i] * gains[i])
                        : Matrix(k.S[i] * (e->transpose() * gains[i] * *e));
    }
    return m;
  };
  const Matrix m0 = sample(0.0, nullptr);
  const Matrix mh = sample(0.5, &maps.half);
  const Matrix m1 = sample(1.0, &maps.full);
  const double w = tau / 12.0;
  const Matrix first = matfun::expm(w * (3.0 * m0 + 4.0 * mh - m1));
  const Matrix second = matfun::expm(w * (-m0 + 4.0 * mh + 3.0 * m1));
  if (first.rows() != n) {
    throw DimensionError("NearIntegrableIntegrator: state map has wrong size");
  }
  return second * first;
}

ExtendedState NearIntegrableIntegrator::step(double h, const ExtendedState& s) {
  if (s.v.rows() != sys_.stacked_rows() || s.v.cols() != sys_.state_dim() ||
      s.x.size() != sys_.state_dim()) {
    throw DimensionError("NearIntegrableIntegrator: state does not match the system");
  }
  if (h == 0.0) {
    return s;
  }
  const Index n = sys_.state_dim();
  ExtendedState out = s;
  for (std::size_t i = 0; i < scheme_.pairs(); ++i) {
    const double a = scheme_.a[i];
    const double b = scheme_.b[i];
    if (a != 0.0) {
      const double tau = a * h;
      out.x = state_map(tau, out.t1, out.v) * out.x;
      const NodalMaps& maps = nodal(tau);
      out.v.topRows(n) = maps.forward * out.v.topRows(n);
      for (std::size_t p = 0; p < sys_.players(); ++p) {
        auto block = out.v.middleRows(static_cast<Index>(p + 1) * n, n);
        block = maps.full.transpose() * block;
      }
      out.t1 += tau;
    }
    if (b != 0.0) {
      const Matrix x = (b * h) * (sys_.coefficient_matrix(out.t1) - dominant_block_);
      // Horner form of (I + X + X^2/2 + X^3/6 + X^4/24) v.
      Matrix w = out.v;
      for (int k = 4; k >= 1; --k) {
        w = out.v + (x * w) / static_cast<double>(k);
      }
      out.v = std::move(w);
      ++evaluations_;
    }
  }
  out.t1 = s.t1 + h;
  out.t2 = out.t1;
  return out;
}

Trajectory run_forward(const CoupledSystem& sys, const Matrix& v0, const StepMap& step,
                       std::size_t steps) {
  if (steps < 1) {
    throw InputError("run_forward: steps must be at least 1");
  }
  const double h = (sys.T() - sys.t0()) / static_cast<double>(steps);
  ExtendedState state{v0, sys.x0(), sys.t0(), sys.t0()};
  Trajectory traj;
  traj.samples.reserve(steps + 1);
  traj.samples.push_back(make_sample(sys, state.t1, state.v, state.x));
  for (std::size_t k = 0; k < steps; ++k) {
    state = step(h, state);
    state.t1 = k + 1 == steps ? sys.T() : sys.t0() + static_cast<double>(k + 1) * h;
    state.t2 = state.t1;
    traj.samples.push_back(make_sample(sys, state.t1, state.v, state.x));
  }
  return traj;
}

}  // namespace lqsplit
