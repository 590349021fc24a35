#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wavefreeze/grid.hpp"
#include "wavefreeze/phaseplane.hpp"
#include "wavefreeze/reaction.hpp"

/// Method of lines for the frozen-wave equation on [a,b]:
///   v_t = v_xx + lambda(v) v_x + f(v),  v(a) = 0, v(b) = 1,
/// with lambda given by one of the speed functionals.
namespace wavefreeze::evolution {

using reaction::BistableReaction;

enum class SpeedFunctional {
  Quotient,      // -<f(v), v_x> / <v_x, v_x>
  Potential,     // -I1 / <v_x, v_x>
  IntegralMass,  // -integral of f(v)
};

const char* to_string(SpeedFunctional functional);
/// Accepts "quotient", "potential", "integral_mass" (case-insensitive). Throws Config otherwise.
SpeedFunctional parse_functional(const std::string& name);

struct InitialData {
  enum class Kind { LinearRamp, SineMix, Step, FromProfile, Custom };

  Kind kind = Kind::LinearRamp;
  double lo = 0.2;  // Step
  double hi = 0.8;
  std::shared_ptr<const phaseplane::StationaryProfile> profile;  // FromProfile, placed on the grid as is
  std::vector<double> samples;                                   // Custom, one value per node

  static InitialData linear_ramp() { return {}; }
  static InitialData sine_mix() {
    InitialData d;
    d.kind = Kind::SineMix;
    return d;
  }
  static InitialData step(double lo, double hi) {
    InitialData d;
    d.kind = Kind::Step;
    d.lo = lo;
    d.hi = hi;
    return d;
  }
  static InitialData from_profile(phaseplane::StationaryProfile profile);
  static InitialData custom(std::vector<double> samples);
};

/// Node values of the initial data with the boundary nodes overwritten by 0 and 1.
/// On [a,b], with m the midpoint and J the half width:
///   LinearRamp (x - a) / (b - a)
///   SineMix    (1 + 0.53 (x-m)/J + 0.47 sin(-3 pi (x-m) / (2J))) / 2
///   Step       lo left of m, hi right of m, their mean at m
std::vector<double> initial_values(const InitialData& data, const GridSpec& grid);

/// Discrete gradient: centred at interior nodes, second-order one-sided at the ends.
std::vector<double> gradient(const GridSpec& grid, const std::vector<double>& v);
/// Trapezoid rule over the nodes.
double trapezoid(const GridSpec& grid, const std::vector<double>& values);

struct GradientNorms {
  double l1;
  double l2_sq;
};
GradientNorms diagnostics(const GridSpec& grid, const std::vector<double>& v);

constexpr double kDegenerateGradient = 1e-14;

/// Throws Degenerate when <v_x, v_x> <= 1e-14 for Quotient and Potential.
double lambda_of_state(const GridSpec& grid, const std::vector<double>& v, const BistableReaction& reaction,
                       SpeedFunctional functional);

/// dv/dt at every node for a given lambda; boundary rows are 0.
std::vector<double> semidiscrete_rhs(const GridSpec& grid, const std::vector<double>& v,
                                     const BistableReaction& reaction, double lambda);
std::vector<double> semidiscrete_rhs(const GridSpec& grid, const std::vector<double>& v,
                                     const BistableReaction& reaction, SpeedFunctional functional);

struct HistoryRow {
  double t;
  double lambda;
  double gamma;
  double l1_grad;
  double l2_grad_sq;
  double sup_err = std::numeric_limits<double>::quiet_NaN();  // vs the reference, when one is given
};

struct EvolutionState {
  GridSpec grid;
  std::vector<double> v;
  double t = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;  // integral of lambda over [0, t]
  std::vector<HistoryRow> history;
  long accepted_steps = 0;
  long rejected_steps = 0;
  long bound_rejections = 0;  // steps retried because they left [0, 1] by more than the bound tolerance
  double min_v = 0.0;         // extremes over all accepted states
  double max_v = 1.0;
};

/// Starting state at t = 0 (boundary values imposed, lambda evaluated, one history row).
EvolutionState make_state(const GridSpec& grid, std::vector<double> v, const BistableReaction& reaction,
                          SpeedFunctional functional);

/// One IMEX step: Crank-Nicolson for v_xx, explicit midpoint for the rest.
/// Does not append history.
EvolutionState step(const EvolutionState& state, const BistableReaction& reaction, SpeedFunctional functional,
                    double dt);

struct StepControl {
  double atol = 1e-8;
  double rtol = 1e-8;
  double dt_initial = 0.0;  // 0 means 0.25 dx^2
  double dt_max = 1.0;
  double dt_min = 1e-14;
  long max_steps = 50'000'000;
  int record_every = 1;  // history row every n accepted steps (the final state is always recorded)
  double bound_tol = 1e-9;
};

/// Adaptive integration to time T with a PI controller on the difference
/// between the IMEX step and an IMEX-Euler step.
EvolutionState evolve(const BistableReaction& reaction, const GridSpec& grid, const InitialData& initial,
                      SpeedFunctional functional, double T, const StepControl& control = {},
                      const std::vector<double>* reference = nullptr);

/// Continues an existing state to time T.
EvolutionState evolve_from(EvolutionState state, const BistableReaction& reaction, SpeedFunctional functional,
                           double T, const StepControl& control = {}, const std::vector<double>* reference = nullptr);

struct SpeedErrorSeries {
  std::vector<double> t;
  std::vector<double> error;
  double decay_slope;  // least-squares slope of log(error) over the final half of the time range
};

SpeedErrorSeries speed_error_series(const std::vector<HistoryRow>& history, double c_ref);

/// Least-squares slope of log|lambda(t) - c_ref| over rows with t in [t_from, t_to]
/// (rows with zero error are skipped). NaN with fewer than two usable rows.
double fit_decay_slope(const std::vector<HistoryRow>& history, double c_ref, double t_from, double t_to);

struct DiscreteStationary {
  std::vector<double> v;
  double lambda;         // the functional evaluated at v
  double pinned_lambda;  // the speed that makes v an exact zero of the discrete right-hand side
  double residual;       // max |rhs| at interior nodes for pinned_lambda
  int iterations;
};

/// Equilibrium of the semi-discrete system near `guess`. The translation mode
/// is nearly neutral on long intervals, so the node closest to the 1/2
/// crossing of the guess is held fixed and the speed is solved for alongside
/// the state (bordered Newton). lambda and pinned_lambda then differ only by
/// the exponentially small drift of the front.
DiscreteStationary discrete_stationary(const BistableReaction& reaction, const GridSpec& grid,
                                       SpeedFunctional functional, std::vector<double> guess, double tol = 1e-13,
                                       int max_iterations = 50);

/// Gradient of the discrete functional with respect to every node value.
std::vector<double> lambda_gradient(const GridSpec& grid, const std::vector<double>& v,
                                    const BistableReaction& reaction, SpeedFunctional functional);

}  // namespace wavefreeze::evolution
