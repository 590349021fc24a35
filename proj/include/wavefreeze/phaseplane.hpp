#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wavefreeze/errors.hpp"
#include "wavefreeze/grid.hpp"
#include "wavefreeze/ode.hpp"
#include "wavefreeze/reaction.hpp"

/// Phase-plane machinery for U' = V, V' = -cV - f(U): orbit integration with
/// event location, simple solutions, shooting for a prescribed travel time,
/// heteroclinic bisection for the wave speed and the nested shooting for the
/// nonlocal stationary profile on a bounded interval.
namespace wavefreeze::phaseplane {

using reaction::BistableReaction;

struct PhaseState {
  double xi = 0.0;
  double u = 0.0;
  double v = 0.0;
};

/// Accepted-step record. `w` is 1 - u carried with full relative accuracy once
/// the orbit passes u = 1/2 (the integrator switches to w as its variable).
struct OrbitSample {
  double xi;
  double u;
  double w;
  double v;
  double dv;   // dV/dxi at the sample
  double ddv;  // d2V/dxi2 at the sample
};

struct EventSpec {
  bool u_zero = false;  // U decreasing through 0
  bool u_one = false;   // U increasing through 1
  bool v_zero = false;  // V changing sign
  bool u_half = false;  // U crossing 1/2 (either direction)

  static EventSpec all() { return {true, true, true, false}; }
};

struct ReachedOne {
  double upsilon;
  double time;
};
struct HitVZero {
  double u_at_stop;
  double time;
};
struct ExitedLeft {
  double time;
};
struct Unresolved {
  double max_time;
};
struct ReachedHalf {
  double v;
  double time;
};
using OrbitFate = std::variant<ReachedOne, HitVZero, ExitedLeft, Unresolved, ReachedHalf>;

std::string describe(const OrbitFate& fate);

struct OrbitOptions {
  ode::Tolerance tolerance{};
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 1e-2;
  long max_steps = 20'000'000;
};

struct Orbit {
  OrbitFate fate;
  std::vector<OrbitSample> samples;
  double xi_half = std::numeric_limits<double>::quiet_NaN();  // first crossing of U = 1/2
  double grad_l2_sq = 0.0;                                   // integral of V^2 d(xi)
};

/// Adaptive Dormand-Prince integration with dense-output event location.
/// Tolerances are applied with the absolute part scaled by the size of the
/// initial state, so orbits launched at tiny slopes stay resolved.
Orbit integrate_orbit(const BistableReaction& reaction, double c, PhaseState start, EventSpec events,
                      double max_time, const OrbitOptions& options = {});

struct SimpleSolutionTrace {
  double c = 0.0;
  double theta = 0.0;
  double upsilon = 0.0;
  double travel_time = 0.0;
  double xi_half = 0.0;
  double grad_l2_sq = 0.0;
  /// Jump in V at U = 1/2 for traces assembled from two half orbits (0 for a single orbit).
  double match_defect = 0.0;
  std::vector<OrbitSample> samples;
};

struct TraceOutcome {
  OrbitFate fate;
  std::optional<SimpleSolutionTrace> trace;
};

TraceOutcome trace_simple_solution(const BistableReaction& reaction, double c, double theta,
                                   const OrbitOptions& options = {}, double max_time = 1e4);

/// Travel time recomputed as the integral of dU / P(U) over [0,1], with P the
/// quintic Hermite interpolant of the samples (switching to the variable 1 - U
/// on the upper half).
double travel_time_quadrature(const SimpleSolutionTrace& trace);

/// Slope of the orbit graph, dP/dU = -c - f(U)/P.
double orbit_graph_slope(const BistableReaction& reaction, double c, double u, double p);

/// Interpolated P(U) for U in [0,1].
double orbit_graph_value(const SimpleSolutionTrace& trace, double u);

struct LengthShot {
  double theta;
  SimpleSolutionTrace trace;
  int orbit_evaluations = 0;
};

enum class ShotFailure {
  None,
  ThetaUnderflow,    // length not reached even by the smallest representable launch slope
  CriticalLimit,     // travel times saturate below r near the critical launch slope
  UpperUnbounded,    // could not find a launch slope with travel time below r
};

struct ShotAttempt {
  std::optional<LengthShot> shot;
  ShotFailure failure = ShotFailure::None;
  std::string message;
};

/// Launch slope theta for which the simple solution from (0, theta) has travel time r.
/// The orbit is assembled from a forward half launched at (0, theta) and a
/// backward half launched at (1, upsilon), matched in V at U = 1/2, so that
/// neither half has to pass a saddle in its unstable direction.
/// Throws NoSolution when r is not attainable at this c.
LengthShot shoot_theta_for_length(const BistableReaction& reaction, double c, double r,
                                  const OrbitOptions& options = {}, double time_tol = 1e-10);

/// Non-throwing variant reporting why the shot failed.
ShotAttempt try_shoot_theta_for_length(const BistableReaction& reaction, double c, double r,
                                       const OrbitOptions& options = {}, double time_tol = 1e-10);

struct HeteroclinicOptions {
  double seed = 1e-8;
  bool verify_seed = true;
  double max_time = 1e4;
  OrbitOptions orbit{};
};

/// Fate of the orbit leaving (0,0) along its unstable eigendirection.
OrbitFate classify_unstable_orbit(const BistableReaction& reaction, double c, double seed = 1e-8,
                                  const OrbitOptions& options = {}, double max_time = 1e4);

/// Bisection on c for the unique speed at which the unstable orbit of (0,0)
/// connects to (1,0).
double heteroclinic_speed(const BistableReaction& reaction, std::pair<double, double> bracket, double tol,
                          const HeteroclinicOptions& options = {});

/// Same, with the bracket grown from [-1, 1] until the two fates differ.
double heteroclinic_speed(const BistableReaction& reaction, double tol, const HeteroclinicOptions& options = {});

struct ScanEntry {
  double c;
  double theta;     // NaN when the inner shot failed
  double mismatch;  // V from the left minus V from the right at U = 1/2; NaN when the inner shot failed
  std::string status;
};

class StationaryNoSolution : public Error {
 public:
  StationaryNoSolution(const std::string& what, std::vector<ScanEntry> scan)
      : Error(ErrorKind::NoSolution, what), scan_(std::move(scan)) {}
  const std::vector<ScanEntry>& scan() const { return scan_; }

 private:
  std::vector<ScanEntry> scan_;
};

/// Stationary solution of the nonlocal problem on an interval of length r,
/// placed so that profile(0) = 1/2 unless moved with placed_at().
///
/// Both half orbits are launched with the same slope theta, so Phi'(a) and
/// Phi'(b) agree exactly and slope_residual reports the V jump at the
/// matching point instead: the amount by which the profile carried from a
/// to b would miss the slope condition.
struct StationaryProfile {
  double a = 0.0;
  double b = 0.0;
  double lambda_r = 0.0;
  double theta = 0.0;    // Phi'(a)
  double upsilon = 0.0;  // Phi'(b)
  double grad_l2_sq = 0.0;
  double normalization_shift = 0.0;  // xi at which the trace crosses 1/2
  double slope_residual = 0.0;       // |Phi'(a) - Phi'(b)| of the assembled profile, see below
  double identity_residual = 0.0;    // lambda_r * grad_l2_sq + I1
  bool resolution_limited = false;   // speed bracket collapsed to adjacent doubles
  std::vector<ScanEntry> scan;
  SimpleSolutionTrace trace;

  double length() const { return b - a; }
  StationaryProfile placed_at(double new_a) const;
  double value(double x) const;
  double slope(double x) const;
};

struct StationaryOptions {
  OrbitOptions orbit{ode::Tolerance{1e-12, 1e-12}};
  std::optional<std::pair<double, double>> bracket;
  int scan_points = 32;
  bool use_heteroclinic = true;
};

StationaryProfile stationary_nonlocal(const BistableReaction& reaction, double r, double tol = 1e-9,
                                      const StationaryOptions& options = {});

/// Profile values on the grid nodes (grid coordinates are in the profile's placement).
std::vector<double> profile_on_grid(const StationaryProfile& profile, const GridSpec& grid);
/// Profile slopes on the grid nodes.
std::vector<double> profile_slope_on_grid(const StationaryProfile& profile, const GridSpec& grid);

struct ReferenceProfile {
  std::function<double(double)> value;
  std::function<double(double)> slope;
};

/// Exact Nagumo front 1 / (1 + exp(-x / sqrt 2)).
ReferenceProfile nagumo_exact_profile();

struct ProfileComparison {
  double sup_err;
  double grad_l2_err;
};

/// Extends the profile by 0 left of a and 1 right of b and compares with the
/// reference on [a - pad, b + pad].
ProfileComparison compare_to_reference(const StationaryProfile& profile, const ReferenceProfile& reference,
                                       double pad = 20.0, double h = 1e-2);

}  // namespace wavefreeze::phaseplane
