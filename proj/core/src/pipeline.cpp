#include "lqsplit/pipeline.hpp"

#include <array>
#include <cctype>
#include <string>
#include <utility>

#include "lqsplit/errors.hpp"
#include "lqsplit/reference.hpp"
#include "lqsplit/riccati.hpp"
#include "lqsplit/splitting.hpp"

namespace lqsplit {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 9> kNames = {{
    {Method::sp1, "sp1"},
    {Method::sp2, "sp2"},
    {Method::sp4, "sp4"},
    {Method::sp6, "sp6"},
    {Method::s2c4, "s2c4"},
    {Method::ni42, "ni42"},
    {Method::ni84, "ni84"},
    {Method::rk4, "rk4"},
    {Method::dopri, "dopri"},
}};

Trajectory run_flat(const CoupledSystem& sys, const Matrix& v0, const SolveOptions& opts) {
  FlatODE ode = coupled_flat_ode(sys);
  const Index rows = sys.stacked_rows();
  const Index n = sys.state_dim();
  Trajectory traj;
  auto observe = [&](double t, const Vector& y) {
    Matrix v;
    Vector x;
    unpack_state(y, rows, n, v, x);
    traj.samples.push_back(make_sample(sys, t, v, x));
  };
  const Vector y0 = pack_state(v0, sys.x0());
  if (opts.method == Method::rk4) {
    rk4(ode, sys.t0(), sys.T(), opts.steps, y0, observe);
    traj.evaluations = ode.evaluations();
  } else {
    const auto [atol, rtol] = tolerance_ladder(opts.tol_exponent);
    const AdaptiveResult res = adaptive_solve(ode, sys.t0(), sys.T(), y0, atol, rtol, observe);
    traj.evaluations = res.evaluations;
  }
  return traj;
}

}  // namespace

Method parse_method(std::string_view name) {
  std::string key(name);
  for (auto& c : key) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  for (const auto& [m, n] : kNames) {
    if (n == key) {
      return m;
    }
  }
  std::string valid;
  for (const auto& entry : kNames) {
    valid += valid.empty() ? "" : "|";
    valid += entry.second;
  }
  throw ConfigError("unknown method '" + std::string(name) + "', expected one of " + valid);
}

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kNames) {
    if (method == m) {
      return name;
    }
  }
  return "?";
}

bool is_splitting(Method m) { return m != Method::rk4 && m != Method::dopri; }

Trajectory solve_forward(const CoupledSystem& sys, const Matrix& v0, const SolveOptions& opts) {
  if (v0.rows() != sys.stacked_rows() || v0.cols() != sys.state_dim()) {
    throw DimensionError("solve_forward: initial flow has wrong shape");
  }
  if (opts.steps < 1 && opts.method != Method::dopri) {
    throw InputError("solve_forward: steps must be at least 1");
  }
  if (!is_splitting(opts.method)) {
    return run_flat(sys, v0, opts);
  }

  const SplittingScheme& scheme = find_scheme(method_name(opts.method));
  Trajectory traj;
  switch (scheme.kind) {
    case SchemeKind::general: {
      SplittingIntegrator integrator(sys, scheme);
      traj = run_forward(
          sys, v0, [&](double h, const ExtendedState& s) { return integrator.step(h, s); },
          opts.steps);
      traj.evaluations = integrator.evaluations();
      break;
    }
    case SchemeKind::near_integrable: {
      NearIntegrableIntegrator integrator(sys, scheme, opts.dominant);
      traj = run_forward(
          sys, v0, [&](double h, const ExtendedState& s) { return integrator.step(h, s); },
          opts.steps);
      traj.evaluations = integrator.evaluations();
      break;
    }
    case SchemeKind::composition: {
      const StepMap step = compose(
          [&sys](double h, const ExtendedState& s) { return s2_step(h, s, sys); },
          scheme.alphas);
      traj = run_forward(sys, v0, step, opts.steps);
      traj.evaluations = opts.steps * scheme.alphas.size();
      break;
    }
  }
  return traj;
}

Trajectory solve(const CoupledSystem& sys, const SolveOptions& opts) {
  const BackwardResult back = riccati::backward_pass(sys, opts.backward_tolerance);
  Trajectory traj = solve_forward(sys, back.v, opts);
  traj.backward_steps = back.steps;
  traj.backward_error = back.error_estimate;
  return traj;
}

Trajectory solve(const LQProblem& prob, const SolveOptions& opts) {
  return solve(to_coupled(prob), opts);
}

}  // namespace lqsplit
