#include "lqsplit/reference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "lqsplit/errors.hpp"

namespace lqsplit {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kBeta = 0.04;
constexpr double kExpo1 = 0.2 - kBeta * 0.75;
constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;
constexpr std::size_t kMaxSteps = 10'000'000;

double error_norm(const Vector& err, const Vector& y0, const Vector& y1, double atol,
                  double rtol) {
  const Vector sc = (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
  return std::sqrt((err.array() / sc.array()).square().mean());
}

// Standard DOPRI initial step guess from two trial derivative evaluations.
double initial_step(FlatODE& ode, double t0, const Vector& y0, const Vector& f0, double dir,
                    double hmax, double atol, double rtol) {
  const Vector sc = (atol + rtol * y0.cwiseAbs().array()).matrix();
  const double dnf = (f0.array() / sc.array()).square().mean();
  const double dny = (y0.array() / sc.array()).square().mean();
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, hmax);
  const Vector f1 = ode(t0 + dir * h, y0 + dir * h * f0);
  const double der2 = std::sqrt(((f1 - f0).array() / sc.array()).square().mean()) / h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                   : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * std::abs(h), h1, hmax});
}

}  // namespace

FlatODE::FlatODE(Index dimension, Rhs rhs) : dim_(dimension), rhs_(std::move(rhs)) {
  if (dim_ < 1) {
    throw DimensionError("FlatODE: dimension must be positive");
  }
  if (!rhs_) {
    throw InputError("FlatODE: empty right-hand side");
  }
}

Vector FlatODE::operator()(double t, const Vector& y) {
  if (y.size() != dim_) {
    throw DimensionError("FlatODE: state has wrong length");
  }
  ++count_;
  Vector f = rhs_(t, y);
  if (f.size() != dim_) {
    throw DimensionError("FlatODE: right-hand side has wrong length");
  }
  return f;
}

Vector rk4_step(FlatODE& ode, double t, double h, const Vector& y) {
  const Vector k1 = ode(t, y);
  const Vector k2 = ode(t + 0.5 * h, y + (0.5 * h) * k1);
  const Vector k3 = ode(t + 0.5 * h, y + (0.5 * h) * k2);
  const Vector k4 = ode(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector rk4(FlatODE& ode, double t0, double t1, std::size_t steps, const Vector& y0,
           const Observer& observer) {
  if (steps < 1) {
    throw InputError("rk4: steps must be at least 1");
  }
  const double h = (t1 - t0) / static_cast<double>(steps);
  Vector y = y0;
  if (observer) {
    observer(t0, y);
  }
  for (std::size_t k = 0; k < steps; ++k) {
    y = rk4_step(ode, t0 + static_cast<double>(k) * h, h, y);
    if (observer) {
      observer(k + 1 == steps ? t1 : t0 + static_cast<double>(k + 1) * h, y);
    }
  }
  return y;
}

AdaptiveResult adaptive_solve(FlatODE& ode, double t0, double t1, const Vector& y0,
                              double abs_tol, double rel_tol, const Observer& observer) {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw InputError("adaptive_solve: tolerances must be positive");
  }
  if (y0.size() != ode.dimension()) {
    throw DimensionError("adaptive_solve: initial value has wrong length");
  }
  AdaptiveResult res;
  const std::size_t start_count = ode.evaluations();
  res.y = y0;
  if (observer) {
    observer(t0, y0);
  }
  if (t1 == t0) {
    return res;
  }
  const double span = std::abs(t1 - t0);
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double hmin = 1e-14 * span;

  double t = t0;
  Vector y = y0;
  Vector k1 = ode(t, y);
  double h = initial_step(ode, t, y, k1, dir, span, abs_tol, rel_tol);
  double facold = 1e-4;
  bool last_rejected = false;

  for (std::size_t n = 0;; ++n) {
    if (n > kMaxSteps) {
      throw ConvergenceError("adaptive_solve: step limit exceeded");
    }
    bool last = false;
    if (std::abs(t1 - t) <= h * (1.0 + 1e-12)) {
      h = std::abs(t1 - t);
      last = true;
    }
    if (h < hmin) {
      std::ostringstream os;
      os << "adaptive_solve: step size " << h << " underflows at t = " << t;
      throw ConvergenceError(os.str());
    }
    const double hs = dir * h;
    const Vector k2 = ode(t + c2 * hs, y + hs * (a21 * k1));
    const Vector k3 = ode(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    const Vector k4 = ode(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = ode(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 =
        ode(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vector ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Vector k7 = ode(t + hs, ynew);
    const Vector err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, ynew, abs_tol, rel_tol);
    if (!std::isfinite(en)) {
      throw ConvergenceError("adaptive_solve: non-finite error estimate");
    }

    const double fac11 = std::pow(std::max(en, 1e-300), kExpo1);
    if (en <= 1.0) {
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
      facold = std::max(en, 1e-4);
      ++res.accepted;
      t = last ? t1 : t + hs;
      y = ynew;
      k1 = k7;
      if (observer) {
        observer(t, y);
      }
      if (last) {
        break;
      }
      double hnew = h / fac;
      if (last_rejected) {
        hnew = std::min(hnew, h);
      }
      last_rejected = false;
      h = hnew;
    } else {
      ++res.rejected;
      last_rejected = true;
      h = h / std::min(1.0 / kFacMin, fac11 / kSafety);
    }
  }
  res.y = std::move(y);
  res.evaluations = ode.evaluations() - start_count;
  return res;
}

std::pair<double, double> tolerance_ladder(int exponent) {
  return {std::pow(10.0, -exponent), std::pow(10.0, 1 - exponent)};
}

Vector pack_state(const Matrix& v, const Vector& x) {
  Vector y(v.size() + x.size());
  y.head(v.size()) = Eigen::Map<const Vector>(v.data(), v.size());
  y.tail(x.size()) = x;
  return y;
}

void unpack_state(const Vector& y, Index rows, Index cols, Matrix& v, Vector& x) {
  if (y.size() < rows * cols) {
    throw DimensionError("unpack_state: flat vector too short");
  }
  v = Eigen::Map<const Matrix>(y.data(), rows, cols);
  x = y.tail(y.size() - rows * cols);
}

FlatODE coupled_flat_ode(const CoupledSystem& sys) {
  const Index rows = sys.stacked_rows();
  const Index n = sys.state_dim();
  auto rhs = [&sys, rows, n](double t, const Vector& y) {
    Matrix v;
    Vector x;
    unpack_state(y, rows, n, v, x);
    const Coefficients c = sys.coefficients(t);
    return pack_state(CoupledSystem::assemble(c) * v, sys.closed_loop(c, v) * x);
  };
  return FlatODE(rows * n + n, std::move(rhs));
}

}  // namespace lqsplit
