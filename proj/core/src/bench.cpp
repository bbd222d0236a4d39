#include "lqsplit/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "lqsplit/errors.hpp"
#include "lqsplit/magnus.hpp"
#include "lqsplit/reference.hpp"
#include "lqsplit/riccati.hpp"

namespace lqsplit {

namespace {

constexpr double kReferenceAgreement = 1e-11;
constexpr std::size_t kMaxReferenceSteps = std::size_t{1} << 20;

std::vector<double> reciprocals(const std::vector<double>& c) {
  std::vector<double> d(c.size());
  std::transform(c.begin(), c.end(), d.begin(), [](double v) { return 1.0 / v; });
  return d;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TimeFunction TimeFunction::constant(double value) {
  TimeFunction f;
  f.kind = Kind::constant;
  f.base = value;
  return f;
}

TimeFunction TimeFunction::tanh_ramp(double base, double amplitude, double rate, double center) {
  TimeFunction f;
  f.kind = Kind::tanh_ramp;
  f.base = base;
  f.amplitude = amplitude;
  f.rate = rate;
  f.center = center;
  return f;
}

double TimeFunction::operator()(double t) const {
  if (kind == Kind::constant) {
    return base;
  }
  return base + amplitude * std::tanh(rate * (t - center));
}

std::vector<double> linear_generator(std::size_t players, double offset, double scale) {
  std::vector<double> c(players);
  for (std::size_t i = 0; i < players; ++i) {
    c[i] = scale * (offset + static_cast<double>(i + 1));
  }
  return c;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig1", "fig2", "fig3a", "fig3b"};
  return names;
}

PollutionConfig pollution_preset(std::string_view name) {
  PollutionConfig cfg;
  if (name == "fig1" || name == "fig2") {
    cfg.players = 10;
    cfg.a = TimeFunction::constant(name == "fig1" ? 1.0 : 2.0);
    cfg.b = TimeFunction::constant(1.0);
    cfg.c = linear_generator(cfg.players, name == "fig1" ? 10.0 : 100.0, 0.5);
  } else if (name == "fig3a" || name == "fig3b") {
    cfg.players = 1;
    cfg.a = TimeFunction::tanh_ramp(2.0, 1.0, 5.0, 0.5);
    cfg.b = TimeFunction::constant(1.0);
    cfg.c = {name == "fig3a" ? 11.0 / 2.0 : 101.0 / 2.0};
    cfg.rho = 0.1;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "', expected fig1|fig2|fig3a|fig3b");
  }
  cfg.d = reciprocals(cfg.c);
  cfg.T = 1.0;
  cfg.x0 = 10.0;
  return cfg;
}

void validate(const PollutionConfig& cfg) {
  if (cfg.players < 1) {
    throw ConfigError("pollution: at least one player required");
  }
  if (cfg.c.size() != cfg.players || cfg.d.size() != cfg.players) {
    throw ConfigError("pollution: c and d need one entry per player");
  }
  for (std::size_t i = 0; i < cfg.players; ++i) {
    if (!(cfg.c[i] > 0.0) || !(cfg.d[i] > 0.0)) {
      throw ConfigError("pollution: c and d must be positive (player " + std::to_string(i + 1) +
                        ")");
    }
  }
  if (cfg.b.is_constant() && cfg.b(0.0) == 0.0) {
    throw ConfigError("pollution: b must be nonzero");
  }
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.rho) || !std::isfinite(cfg.x0)) {
    throw ConfigError("pollution: need T > 0 and finite rho, x0");
  }
}

GameProblem build_pollution(const PollutionConfig& cfg) {
  validate(cfg);
  GameProblem g;
  const TimeFunction a = cfg.a;
  const TimeFunction b = cfg.b;
  const double rho = cfg.rho;
  g.A = a.is_constant() ? TimeMatrix::constant(scalar(-a(0.0)))
                        : TimeMatrix([a](double t) { return scalar(-a(t)); }, 1, 1, false);
  for (std::size_t i = 0; i < cfg.players; ++i) {
    const double c = cfg.c[i];
    const double d = cfg.d[i];
    Player p;
    p.B = b.is_constant() ? TimeMatrix::constant(scalar(b(0.0)))
                          : TimeMatrix([b](double t) { return scalar(b(t)); }, 1, 1, false);
    if (rho == 0.0) {
      p.Q = TimeMatrix::constant(scalar(d));
      p.R = TimeMatrix::constant(scalar(c));
    } else {
      p.Q = TimeMatrix([d, rho](double t) { return scalar(d * std::exp(-rho * t)); }, 1, 1);
      p.R = TimeMatrix([c, rho](double t) { return scalar(c * std::exp(-rho * t)); }, 1, 1);
    }
    p.QT = Matrix::Zero(1, 1);
    g.players.push_back(std::move(p));
  }
  g.x0 = Vector::Constant(1, cfg.x0);
  g.t0 = 0.0;
  g.T = cfg.T;
  return g;
}

std::optional<Matrix> pollution_dominant(const PollutionConfig& cfg) {
  if (!cfg.a.is_constant()) {
    return std::nullopt;
  }
  return scalar(-cfg.a(0.0));
}

std::vector<double> default_h_ladder() {
  std::vector<double> h;
  for (int k = 2; k <= 8; ++k) {
    h.push_back(std::ldexp(1.0, -k));
  }
  return h;
}

std::vector<int> default_tol_ladder() { return {3, 4, 5, 6, 7, 8, 9, 10}; }

ReferenceSolution reference_endpoint(const CoupledSystem& sys, const Matrix& v0,
                                     std::size_t min_steps) {
  const Index n = sys.state_dim();
  const Vector z = matfun::solve(v0.topRows(n), sys.x0(), "reference: U0");
  ReferenceSolution ref;
  if (sys.autonomous()) {
    const Matrix vT = matfun::expm((sys.T() - sys.t0()) * sys.coefficient_matrix(sys.t0())) * v0;
    ref.xT = vT.topRows(n) * z;
    return ref;
  }
  const Index d = sys.stacked_rows();
  const magnus::LinearFlowProblem flow{
      TimeMatrix([&sys](double t) { return sys.coefficient_matrix(t); }, d, d, false),
      magnus::Direction::forward};
  auto endpoint = [&](std::size_t steps) -> Vector {
    const Matrix vT = magnus::integrate(flow, sys.t0(), sys.T(), steps, v0);
    return vT.topRows(n) * z;
  };
  std::size_t r = std::max<std::size_t>(min_steps, 1);
  Vector coarse = endpoint(r);
  for (;;) {
    const Vector fine = endpoint(2 * r);
    const double diff = (fine - coarse).cwiseAbs().maxCoeff();
    if (diff <= kReferenceAgreement * std::max(1.0, fine.cwiseAbs().maxCoeff())) {
      ref.xT = fine;
      ref.steps = 2 * r;
      ref.self_check = diff;
      return ref;
    }
    if (4 * r > kMaxReferenceSteps) {
      std::ostringstream os;
      os << "reference_endpoint: R and 2R solves differ by " << diff << " at R = " << r;
      throw ConvergenceError(os.str());
    }
    coarse = fine;
    r *= 2;
  }
}

std::vector<SweepResult> run_sweep(const GameProblem& game, const SweepSpec& spec) {
  if (spec.methods.empty()) {
    throw ConfigError("run_sweep: no methods given");
  }
  const std::vector<double> ladder = spec.h_ladder.empty() ? default_h_ladder() : spec.h_ladder;
  const std::vector<int> tols = spec.tol_ladder.empty() ? default_tol_ladder() : spec.tol_ladder;
  for (double h : ladder) {
    if (!(h > 0.0)) {
      throw ConfigError("run_sweep: step sizes must be positive");
    }
  }

  const CoupledSystem sys = to_coupled(game);
  const BackwardResult back = riccati::backward_pass(sys, spec.backward_tolerance);
  const double span = sys.T() - sys.t0();
  const double finest = *std::min_element(ladder.begin(), ladder.end());
  const auto min_steps = static_cast<std::size_t>(
      std::ceil(static_cast<double>(spec.reference_factor) * span / finest));
  const ReferenceSolution ref = reference_endpoint(sys, back.v, min_steps);

  std::vector<SweepResult> rows;
  for (Method m : spec.methods) {
    std::vector<double> resolutions;
    if (m == Method::dopri) {
      for (int i : tols) {
        resolutions.push_back(static_cast<double>(i));
      }
    } else {
      resolutions = ladder;
    }
    for (double res : resolutions) {
      SweepResult row;
      row.method = std::string(method_name(m));
      SolveOptions opts;
      opts.method = m;
      opts.dominant = spec.dominant;
      if (m == Method::dopri) {
        opts.tol_exponent = static_cast<int>(res);
        row.resolution = tolerance_ladder(opts.tol_exponent).first;
      } else {
        opts.steps = static_cast<std::size_t>(std::max(1.0, std::round(span / res)));
        row.resolution = span / static_cast<double>(opts.steps);
      }
      try {
        const auto start = std::chrono::steady_clock::now();
        const Trajectory traj = solve_forward(sys, back.v, opts);
        const auto stop = std::chrono::steady_clock::now();
        if (spec.timing) {
          row.seconds = std::chrono::duration<double>(stop - start).count();
        }
        row.evaluations = traj.evaluations;
        row.x_error = (traj.final().x - ref.xT).cwiseAbs().maxCoeff();
        row.gain_defect = traj.terminal_defect(sys.terminal_weights());
        row.terminal_min_eigenvalue = traj.final().min_eigenvalue;
        row.path_min_eigenvalue = traj.min_eigenvalue();
        row.positivity_flag = row.terminal_min_eigenvalue < spec.positivity_threshold;
        row.symmetry_defect = traj.max_symmetry_defect();
      } catch (const Error& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.x_error = row.gain_defect = row.symmetry_defect = nan;
        row.terminal_min_eigenvalue = row.path_min_eigenvalue = nan;
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_real(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string format_csv(const std::vector<SweepResult>& results) {
  std::string out =
      "method,resolution,evaluations,seconds,x_error,gain_defect,positivity_flag,symmetry_defect\n";
  for (const auto& r : results) {
    out += r.method;
    out += ',' + format_real(r.resolution);
    out += ',' + std::to_string(r.evaluations);
    out += ',' + format_real(r.seconds);
    out += ',' + format_real(r.x_error);
    out += ',' + format_real(r.gain_defect);
    out += r.positivity_flag ? ",true" : ",false";
    out += ',' + format_real(r.symmetry_defect);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<SweepResult>& results, const std::string& path) {
  if (results.empty()) {
    throw InputError("emit_csv: no results to write to " + path);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error("emit_csv: cannot open " + path + " for writing");
  }
  f << format_csv(results);
  f.close();
  if (!f) {
    throw Error("emit_csv: write to " + path + " failed");
  }
}

}  // namespace lqsplit
