#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lqsplit/problem.hpp"
#include "lqsplit/riccati.hpp"
#include "lqsplit/trajectory.hpp"

namespace lqsplit {

enum class SchemeKind { general, near_integrable, composition };

/// Splitting method b_m a_m ... b_1 a_1 stored as pairs (a_i, b_i) in
/// application order: within each pair the state advances with a_i first,
/// then the Riccati flow with b_i.
struct SplittingScheme {
  std::string name;
  std::vector<double> a;
  std::vector<double> b;
  int order = 1;
  /// Order in h when the perturbation vanishes; near-integrable schemes only.
  int limit_order = 0;
  /// Stages per step once FSAL reuse is taken into account.
  int stages = 1;
  bool symmetric = false;
  bool fsal = false;
  SchemeKind kind = SchemeKind::general;
  /// Sub-step fractions of the second-order base map (composition kind).
  std::vector<double> alphas;

  std::size_t pairs() const { return a.size(); }
};

/// SP1, SP2, SP4, SP6, NI42, NI84 and S2C4.
const std::vector<SplittingScheme>& builtin_schemes();

/// Looks a scheme up by name (case-insensitive). Throws ConfigError.
const SplittingScheme& find_scheme(std::string_view name);

/// True when the interleaved coefficient sequence, zero maps removed, reads
/// the same in both directions.
bool is_palindromic(const SplittingScheme& scheme);

/// Order-4 triple-jump weights (a1, a1, a2, a1, a1) for the S2 composition.
std::vector<double> triple_jump_alphas();

/// State of the forward pass: the stacked Riccati flow v = [U; V_1..V_N],
/// the system state x and the two time coordinates driving the state and
/// the Riccati flow respectively.
struct ExtendedState {
  Matrix v;
  Vector x;
  double t1 = 0.0;
  double t2 = 0.0;

  RiccatiFlow flow(Index state_dim) const;
};

using StepMap = std::function<ExtendedState(double h, const ExtendedState& s)>;

/// Table-driven splitting integrator for general schemes.
///
/// step_autonomous() precomputes E_i = exp(b_i h K) per step size;
/// step_nonautonomous() runs the two-time-coordinate algorithm in which the
/// state map uses coefficients frozen at t1 and the Riccati map at t2.
/// The last state or Riccati exponential of a step is memoized so a
/// FSAL-compatible scheme reuses it as the first map of the next step.
/// Holds a reference to `sys`, which must outlive the integrator.
class SplittingIntegrator {
 public:
  SplittingIntegrator(const CoupledSystem& sys, SplittingScheme scheme);

  ExtendedState step_autonomous(double h, const ExtendedState& s);
  ExtendedState step_nonautonomous(double h, const ExtendedState& s);
  /// Dispatches on sys.autonomous().
  ExtendedState step(double h, const ExtendedState& s);

  /// Fresh state exponentials computed so far.
  std::size_t evaluations() const { return evaluations_; }
  const SplittingScheme& scheme() const { return scheme_; }

 private:
  struct Memo {
    bool valid = false;
    double scaled_step = 0.0;
    double time = 0.0;
    Matrix v;
    Matrix map;
  };

  ExtendedState advance(double h, const ExtendedState& s, bool autonomous);
  const Matrix& state_map(double scaled_step, double t1, const Matrix& v);
  const Matrix& riccati_map(std::size_t pair, double scaled_step, double t2, bool autonomous);

  const CoupledSystem& sys_;
  SplittingScheme scheme_;
  double cached_h_;
  std::vector<Matrix> cached_maps_;
  Memo x_memo_;
  Memo v_memo_;
  std::size_t evaluations_ = 0;
};

/// One step of the symmetric second-order map: half state step with data
/// frozen at t1, Cayley map of K(t2 + h/2) over h for the Riccati flow, half
/// state step at the new t1.
ExtendedState s2_step(double h, const ExtendedState& s, const CoupledSystem& sys);

/// prod_i base(alpha_i h). Throws ConfigError unless the alphas sum to one.
StepMap compose(StepMap base, std::vector<double> alphas);

/// Splitting for problems close to the constant-coefficient flow
/// U' = A U, V' = -A^T V.
///
/// a-stages solve that flow exactly together with the state equation, which
/// is integrated by one CF4 Magnus step whose nodal exponentials are cached;
/// b-stages apply the remaining coupling [[0, -S], [-Q, 0]] with t1 frozen
/// through a degree-4 Taylor polynomial. Time is a single coordinate t1.
class NearIntegrableIntegrator {
 public:
  /// `dominant` is the designated constant A; std::nullopt is a MisuseError.
  NearIntegrableIntegrator(const CoupledSystem& sys, SplittingScheme scheme,
                           std::optional<Matrix> dominant);

  ExtendedState step(double h, const ExtendedState& s);
  /// Perturbation maps applied so far (one per nonzero b coefficient).
  std::size_t evaluations() const { return evaluations_; }

 private:
  struct NodalMaps {
    double tau = 0.0;
    Matrix forward;  // exp(tau A)
    Matrix half;     // exp(-tau/2 A)
    Matrix full;     // exp(-tau A)
  };
  const NodalMaps& nodal(double tau);
  Matrix state_map(double tau, double t, const Matrix& v);

  const CoupledSystem& sys_;
  SplittingScheme scheme_;
  Matrix dominant_;
  Matrix dominant_block_;
  std::vector<NodalMaps> nodal_;
  std::size_t evaluations_ = 0;
};

/// Runs `steps` uniform steps of `step` from (v0, x0) at t0 to T, sampling
/// the gains after every step. Evaluations are left at zero.
Trajectory run_forward(const CoupledSystem& sys, const Matrix& v0, const StepMap& step,
                       std::size_t steps);

}  // namespace lqsplit
