#include "wavefreeze/phaseplane.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace wavefreeze::phaseplane {

namespace {

using State = std::array<double, 3>;  // (U or W, V, integral of V^2)

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEventTol = 1e-13;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// Root of s -> g(s) on [0,1] given g(0) and g(1) of opposite sign (Illinois).
template <class G>
double locate_root(G&& g, double g0, double g1, double h) {
  double s0 = 0.0, s1 = 1.0;
  if (g1 == 0.0) return 1.0;
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    if ((s1 - s0) * h <= kEventTol) break;
    double s = (s0 * g1 - s1 * g0) / (g1 - g0);
    if (!(s > s0 && s < s1)) s = 0.5 * (s0 + s1);
    const double gs = g(s);
    if (gs == 0.0) return s;
    if ((gs > 0) == (g1 > 0)) {
      s1 = s;
      g1 = gs;
      if (side == 1) g0 *= 0.5;
      side = 1;
    } else {
      s0 = s;
      g0 = gs;
      if (side == -1) g1 *= 0.5;
      side = -1;
    }
  }
  return s1;
}

bool crosses_down(double a, double b) { return a > 0.0 && b <= 0.0; }
bool changes_sign(double a, double b) { return (a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0); }

double hermite(double t, double h, double y0, double d0, double y1, double d1) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

bool is_reached_one(const OrbitFate& fate) { return std::holds_alternative<ReachedOne>(fate); }

}  // namespace

std::string describe(const OrbitFate& fate) {
  return std::visit(Overloaded{
                        [](const ReachedOne& f) { return "ReachedOne(upsilon=" + fmt(f.upsilon) + ", time=" + fmt(f.time) + ")"; },
                        [](const HitVZero& f) { return "HitVZero(u=" + fmt(f.u_at_stop) + ", time=" + fmt(f.time) + ")"; },
                        [](const ExitedLeft& f) { return "ExitedLeft(time=" + fmt(f.time) + ")"; },
                        [](const Unresolved& f) { return "Unresolved(max_time=" + fmt(f.max_time) + ")"; },
                        [](const ReachedHalf& f) { return "ReachedHalf(v=" + fmt(f.v) + ", time=" + fmt(f.time) + ")"; },
                    },
                    fate);
}

Orbit integrate_orbit(const BistableReaction& reaction, double c, PhaseState start, EventSpec events,
                      double max_time, const OrbitOptions& options) {
  require(max_time > 0.0, "integrate_orbit: max_time must be positive");
  require(std::isfinite(start.u) && std::isfinite(start.v) && std::isfinite(c), "integrate_orbit: non-finite input");

  // Below U = 1/2 the state is (U, V); above it, (W = 1 - U, V).
  bool upper = start.u >= 0.5;
  State y{upper ? 1.0 - start.u : start.u, start.v, 0.0};

  auto rhs = [&](const State& s, State& ds) {
    const double f = upper ? reaction.f_near_one_extended(s[0]) : reaction.f_extended(s[0]);
    ds[0] = upper ? -s[1] : s[1];
    ds[1] = -c * s[1] - f;
    ds[2] = s[1] * s[1];
  };

  double scale = std::min(1.0, std::max(std::abs(y[0]), std::abs(y[1])));
  if (scale == 0.0) scale = 1.0;
  const auto& tol = options.tolerance;
  const std::array<double, 3> atol{tol.atol * scale, tol.atol * scale, tol.atol * scale * scale};

  Orbit orbit{Unresolved{max_time}, {}, kNaN, 0.0};
  auto push_sample = [&](double xi, const State& s) {
    State ds;
    rhs(s, ds);
    const double u = upper ? 1.0 - s[0] : s[0];
    const double w = upper ? s[0] : 1.0 - s[0];
    const double fp = reaction.f_prime(std::clamp(u, 0.0, 1.0));
    orbit.samples.push_back({xi, u, w, s[1], ds[1], -c * ds[1] - fp * s[1]});
  };

  double xi = start.xi;
  const double xi_end = start.xi + max_time;
  push_sample(xi, y);

  ode::DormandPrince<3> stepper;
  State k1;
  rhs(y, k1);
  double h = std::min({options.initial_step, max_time, options.max_step});
  long steps = 0;

  enum class Event { None, Switch, UZero, UOne, VZero };

  while (true) {
    if (++steps > options.max_steps) fail(ErrorKind::Numeric, "integrate_orbit: step budget exhausted");
    const bool last = h >= xi_end - xi;
    if (last) h = xi_end - xi;

    const double err = stepper.attempt(rhs, y, k1, h, atol, tol.rtol);
    const State& y1 = stepper.y1();
    if (!std::isfinite(err) || !std::isfinite(y1[0]) || !std::isfinite(y1[1])) {
      h *= 0.25;
      if (h < 1e-14 * std::max(1.0, std::abs(xi))) fail(ErrorKind::Numeric, "integrate_orbit: non-finite state");
      continue;
    }
    if (err > 1.0) {
      h *= ode::next_step_factor(err);
      if (h < 1e-14 * std::max(1.0, std::abs(xi))) {
        fail(ErrorKind::Numeric, "integrate_orbit: step size underflow at xi=" + fmt(xi));
      }
      continue;
    }

    // Earliest event inside the accepted step.
    Event event = Event::None;
    double frac = 2.0;
    auto consider = [&](Event kind, int comp, double level, double g0, double g1) {
      auto g = [&](double s) { return stepper.dense(s)[static_cast<std::size_t>(comp)] - level; };
      double s = locate_root(g, g0, g1, h);
      if (s < frac) {
        frac = s;
        event = kind;
      }
    };
    if (y[0] < 0.5 && y1[0] >= 0.5) consider(Event::Switch, 0, 0.5, y[0] - 0.5, y1[0] - 0.5);
    if (!upper && events.u_zero && crosses_down(y[0], y1[0])) consider(Event::UZero, 0, 0.0, y[0], y1[0]);
    if (upper && events.u_one && crosses_down(y[0], y1[0])) consider(Event::UOne, 0, 0.0, y[0], y1[0]);
    if (events.v_zero && changes_sign(y[1], y1[1])) consider(Event::VZero, 1, 0.0, y[1], y1[1]);

    if (event == Event::None) {
      xi = last ? xi_end : xi + h;
      y = y1;
      k1 = stepper.k7();
      push_sample(xi, y);
      if (last) {
        orbit.fate = Unresolved{max_time};
        break;
      }
      h *= ode::next_step_factor(err);
      h = std::min(h, options.max_step);
      continue;
    }

    State ye = stepper.dense(frac);
    const double xi_e = xi + frac * h;
    if (event == Event::Switch && events.u_half) {
      ye[0] = 0.5;
      xi = xi_e;
      y = ye;
      push_sample(xi, y);
      orbit.xi_half = xi_e;
      orbit.fate = ReachedHalf{y[1], xi - start.xi};
      break;
    }
    if (event == Event::Switch) {
      if (!upper && std::isnan(orbit.xi_half)) orbit.xi_half = xi_e;
      ye[0] = 0.5;
      upper = !upper;
      xi = xi_e;
      y = ye;
      push_sample(xi, y);
      rhs(y, k1);
      h = std::max(h * (1.0 - frac), 1e-6);
      continue;
    }

    if (event == Event::UZero || event == Event::UOne) ye[0] = 0.0;
    if (event == Event::VZero) ye[1] = 0.0;
    xi = xi_e;
    y = ye;
    push_sample(xi, y);
    const double u = upper ? 1.0 - y[0] : y[0];
    const double t = xi - start.xi;
    switch (event) {
      case Event::UZero:
        orbit.fate = ExitedLeft{t};
        break;
      case Event::UOne:
        orbit.fate = ReachedOne{y[1], t};
        break;
      default:
        orbit.fate = HitVZero{u, t};
        break;
    }
    break;
  }
  orbit.grad_l2_sq = y[2];
  return orbit;
}

TraceOutcome trace_simple_solution(const BistableReaction& reaction, double c, double theta,
                                   const OrbitOptions& options, double max_time) {
  require(theta > 0.0, "trace_simple_solution: theta must be positive");
  Orbit orbit = integrate_orbit(reaction, c, {0.0, 0.0, theta}, EventSpec::all(), max_time, options);
  TraceOutcome out{orbit.fate, std::nullopt};
  if (const auto* hit = std::get_if<ReachedOne>(&orbit.fate); hit && hit->upsilon > 0.0) {
    SimpleSolutionTrace trace;
    trace.c = c;
    trace.theta = theta;
    trace.upsilon = hit->upsilon;
    trace.travel_time = hit->time;
    trace.xi_half = orbit.xi_half;
    trace.grad_l2_sq = orbit.grad_l2_sq;
    trace.samples = std::move(orbit.samples);
    out.trace = std::move(trace);
  }
  return out;
}

double orbit_graph_slope(const BistableReaction& reaction, double c, double u, double p) {
  return -c - reaction.f(u) / p;
}

namespace {

// Hermite pieces of P over consecutive samples; lower-half pieces use U as the
// variable, upper-half pieces use W = 1 - U.
struct GraphPiece {
  bool in_w;
  double x0, x1;  // variable at the two samples (increasing U or decreasing W)
  double p0, p1;
  double d0, d1;  // dP/dx
  double s0, s1;  // d2P/dx2
};

std::vector<GraphPiece> graph_pieces(const SimpleSolutionTrace& trace) {
  std::vector<GraphPiece> pieces;
  const auto& s = trace.samples;
  // dP/dU = V'/V and d2P/dU2 = (V'' V - V'^2) / V^3; the W variable flips the first.
  auto d1 = [](const OrbitSample& o) { return o.dv / o.v; };
  auto d2 = [](const OrbitSample& o) { return (o.ddv * o.v - o.dv * o.dv) / (o.v * o.v * o.v); };
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const bool in_w = !(s[i].u <= 0.5 && s[i + 1].u <= 0.5);
    const double x0 = in_w ? s[i].w : s[i].u;
    const double x1 = in_w ? s[i + 1].w : s[i + 1].u;
    if (x0 == x1) continue;
    const double sign = in_w ? -1.0 : 1.0;
    pieces.push_back({in_w, x0, x1, s[i].v, s[i + 1].v, sign * d1(s[i]), sign * d1(s[i + 1]), d2(s[i]), d2(s[i + 1])});
  }
  return pieces;
}

// Quintic Hermite on [0,1] in t with values, first and second derivatives (in x = x0 + t h).
double piece_value(const GraphPiece& p, double x) {
  const double h = p.x1 - p.x0;
  const double t = (x - p.x0) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h10 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h20 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
  const double h01 = 10 * t3 - 15 * t4 + 6 * t5;
  const double h11 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h21 = 0.5 * (t3 - 2 * t4 + t5);
  return h00 * p.p0 + h10 * h * p.d0 + h20 * h * h * p.s0 + h01 * p.p1 + h11 * h * p.d1 + h21 * h * h * p.s1;
}

}  // namespace

double orbit_graph_value(const SimpleSolutionTrace& trace, double u) {
  require(u >= 0.0 && u <= 1.0, "orbit_graph_value: u outside [0,1]");
  for (const auto& p : graph_pieces(trace)) {
    if (!p.in_w && u >= p.x0 && u <= p.x1) return piece_value(p, u);
    if (p.in_w) {
      const double w = 1.0 - u;
      if (w <= p.x0 && w >= p.x1) return piece_value(p, w);
    }
  }
  fail(ErrorKind::Domain, "orbit_graph_value: u not covered by the trace");
}

double travel_time_quadrature(const SimpleSolutionTrace& trace) {
  require(trace.samples.size() >= 2, "travel_time_quadrature: trace has fewer than two samples");
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (const auto& p : graph_pieces(trace)) {
    auto inv = [&](double x) { return 1.0 / piece_value(p, x); };
    const double lo = std::min(p.x0, p.x1), hi = std::max(p.x0, p.x1);
    total += gauss_kronrod<double, 15>::integrate(inv, lo, hi, 8, 1e-13);
  }
  return total;
}

namespace {

// Illinois iteration on a bracket whose ends carry opposite signs. A NaN
// value at either end degrades the next step to bisection.
struct Illinois {
  double x_neg, f_neg, x_pos, f_pos;
  int side = 0;

  double next() const {
    const double lo = std::min(x_neg, x_pos), hi = std::max(x_neg, x_pos);
    double x = (x_neg * f_pos - x_pos * f_neg) / (f_pos - f_neg);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    return x;
  }
  void update(double x, double f, bool negative) {
    if (negative) {
      x_neg = x;
      f_neg = f;
      if (side == -1) f_pos *= 0.5;
      side = -1;
    } else {
      x_pos = x;
      f_pos = f;
      if (side == 1) f_neg *= 0.5;
      side = 1;
    }
  }
  double width() const { return std::abs(x_pos - x_neg); }
  bool collapsed() const {
    return width() <= 4.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(x_neg), std::abs(x_pos)});
  }
};

struct HalfOrbit {
  bool reached = false;
  double time = 0.0;
  double v = 0.0;       // V at U = 1/2
  double energy = 0.0;  // integral of V^2 over the half
  std::vector<OrbitSample> samples;
};

constexpr EventSpec kHalfEvents{true, true, true, true};

HalfOrbit take_half(Orbit&& orbit, double sign) {
  HalfOrbit h;
  if (const auto* hit = std::get_if<ReachedHalf>(&orbit.fate); hit && sign * hit->v > 0.0) {
    h.reached = true;
    h.time = hit->time;
    h.v = sign * hit->v;
    h.energy = orbit.grad_l2_sq;
    h.samples = std::move(orbit.samples);
  }
  return h;
}

// Forward from (0, theta) to U = 1/2.
HalfOrbit left_half(const BistableReaction& reaction, double c, double theta, const OrbitOptions& options,
                    double max_time) {
  return take_half(integrate_orbit(reaction, c, {0.0, 0.0, theta}, kHalfEvents, max_time, options), 1.0);
}

// Backward from (1, upsilon) to U = 1/2. Reversing xi is the forward flow at
// speed -c with V replaced by -V; samples keep that orientation until assembly.
HalfOrbit right_half(const BistableReaction& reaction, double c, double upsilon, const OrbitOptions& options,
                     double max_time) {
  return take_half(integrate_orbit(reaction, -c, {0.0, 1.0, -upsilon}, kHalfEvents, max_time, options), -1.0);
}

SimpleSolutionTrace assemble(double c, double theta, double upsilon, HalfOrbit&& left, HalfOrbit&& right) {
  SimpleSolutionTrace trace;
  trace.c = c;
  trace.theta = theta;
  trace.upsilon = upsilon;
  trace.travel_time = left.time + right.time;
  trace.xi_half = left.time;
  trace.grad_l2_sq = left.energy + right.energy;
  trace.match_defect = std::abs(left.v - right.v);
  trace.samples = std::move(left.samples);
  trace.samples.reserve(trace.samples.size() + right.samples.size());
  // The last right sample sits at U = 1/2 and duplicates the left end point.
  for (auto it = right.samples.rbegin() + 1; it != right.samples.rend(); ++it) {
    trace.samples.push_back({left.time + (right.time - it->xi), it->u, it->w, -it->v, it->dv, -it->ddv});
  }
  trace.samples.back().u = 1.0;
  trace.samples.back().w = 0.0;
  trace.samples.front().u = 0.0;
  trace.samples.front().w = 1.0;
  return trace;
}

struct MatchedPair {
  double theta = 0.0, upsilon = 0.0;
  HalfOrbit left, right;
  double mismatch = kNaN;  // left.v - right.v
};

// For fixed log(theta * upsilon) = tau, the split s = log(theta) at which the
// two halves meet with equal V. The mismatch increases with s.
std::optional<MatchedPair> match_halves(const BistableReaction& reaction, double c, double tau,
                                        const OrbitOptions& options, double max_time, int& evaluations) {
  auto eval = [&](double s) {
    ++evaluations;
    MatchedPair m;
    m.theta = std::exp(s);
    m.upsilon = std::exp(tau - s);
    m.left = left_half(reaction, c, m.theta, options, max_time);
    m.right = right_half(reaction, c, m.upsilon, options, max_time);
    if (m.left.reached && m.right.reached) m.mismatch = m.left.v - m.right.v;
    return m;
  };
  // A missing left half means V_L is too small; a missing right half, V_R.
  auto negative = [](const MatchedPair& m) { return std::isnan(m.mismatch) ? !m.left.reached : m.mismatch < 0.0; };

  double s0 = 0.5 * tau;
  MatchedPair m0 = eval(s0);
  if (m0.mismatch == 0.0) return m0;
  const bool neg0 = negative(m0);
  const double dir = neg0 ? 1.0 : -1.0;
  double step = 1.0;
  std::optional<MatchedPair> best;
  auto keep = [&](MatchedPair& m) {
    if (!std::isnan(m.mismatch) && (!best || std::abs(m.mismatch) < std::abs(best->mismatch))) best = m;
  };
  keep(m0);
  double s1 = s0;
  MatchedPair m1;
  while (true) {
    s1 = s0 + dir * step;
    if (std::abs(s1) > 745.0 || std::abs(tau - s1) > 745.0) return std::nullopt;
    m1 = eval(s1);
    keep(m1);
    if (negative(m1) != neg0) break;
    s0 = s1;
    m0 = std::move(m1);
    step *= 2.0;
  }

  Illinois it = neg0 ? Illinois{s0, m0.mismatch, s1, m1.mismatch} : Illinois{s1, m1.mismatch, s0, m0.mismatch};
  for (int k = 0; k < 200 && !it.collapsed(); ++k) {
    if (best && std::abs(best->mismatch) <= 1e-15 * std::max(1.0, std::abs(best->left.v))) break;
    const double s = it.next();
    MatchedPair m = eval(s);
    keep(m);
    it.update(s, m.mismatch, negative(m));
  }
  return best;
}

}  // namespace

ShotAttempt try_shoot_theta_for_length(const BistableReaction& reaction, double c, double r,
                                       const OrbitOptions& options, double time_tol) {
  require(r > 0.0, "shoot_theta_for_length: r must be positive");
  require(time_tol > 0.0, "shoot_theta_for_length: time_tol must be positive");
  const double cap = 2.0 * r + 20.0;
  int evaluations = 0;

  // Travel time decreases along the matched family as tau = log(theta * upsilon) grows.
  struct Eval {
    double tau;
    std::optional<MatchedPair> pair;
    double excess;
  };
  auto eval = [&](double tau) {
    Eval e{tau, match_halves(reaction, c, tau, options, cap, evaluations), cap - r};
    if (e.pair) e.excess = e.pair->left.time + e.pair->right.time - r;
    return e;
  };
  auto too_small = [](const Eval& e) { return !e.pair || e.excess > 0.0; };

  ShotAttempt attempt;
  const double theta_safe = std::abs(c) + reaction.sup_norm() + 1.0;
  Eval hi = eval(2.0 * std::log(theta_safe));
  while (too_small(hi)) {
    if (hi.tau > 460.0) {
      attempt.failure = ShotFailure::UpperUnbounded;
      attempt.message = "no simple solution shorter than r=" + fmt(r) + " at c=" + fmt(c);
      return attempt;
    }
    hi = eval(hi.tau + 2.0);
  }
  Eval lo = hi;
  while (!too_small(lo)) {
    hi = std::move(lo);
    // theta * upsilon below e^-600: V^2 in the energy integral would leave the normal range
    if (hi.tau < -600.0) {
      attempt.failure = ShotFailure::ThetaUnderflow;
      attempt.message = "travel time r=" + fmt(r) + " not reached before the launch slopes underflow at c=" + fmt(c);
      return attempt;
    }
    lo = eval(hi.tau - 8.0);
  }
  while (!lo.pair) {
    if (hi.tau - lo.tau < 1e-12 * std::max(1.0, std::abs(hi.tau))) {
      attempt.failure = ShotFailure::CriticalLimit;
      attempt.message = "matched simple solutions cease to exist before reaching r=" + fmt(r) + " at c=" + fmt(c);
      return attempt;
    }
    Eval mid = eval(0.5 * (lo.tau + hi.tau));
    (too_small(mid) ? lo : hi) = std::move(mid);
  }

  Illinois it{hi.tau, hi.excess, lo.tau, lo.excess};
  Eval best = std::abs(lo.excess) < std::abs(hi.excess) ? lo : hi;
  for (int k = 0; k < 200 && std::abs(best.excess) > time_tol && !it.collapsed(); ++k) {
    const double tau = it.next();
    Eval e = eval(tau);
    if (e.pair && std::abs(e.excess) < std::abs(best.excess)) best = e;
    it.update(tau, e.pair ? e.excess : kNaN, !too_small(e));
  }

  MatchedPair& m = *best.pair;
  attempt.shot = LengthShot{m.theta, assemble(c, m.theta, m.upsilon, std::move(m.left), std::move(m.right)),
                            evaluations};
  return attempt;
}

LengthShot shoot_theta_for_length(const BistableReaction& reaction, double c, double r, const OrbitOptions& options,
                                  double time_tol) {
  ShotAttempt attempt = try_shoot_theta_for_length(reaction, c, r, options, time_tol);
  if (!attempt.shot) fail(ErrorKind::NoSolution, "shoot_theta_for_length: " + attempt.message);
  return std::move(*attempt.shot);
}

OrbitFate classify_unstable_orbit(const BistableReaction& reaction, double c, double seed,
                                  const OrbitOptions& options, double max_time) {
  require(seed > 0.0, "classify_unstable_orbit: seed must be positive");
  const double mu = reaction::tail_rates(reaction, c).r2;
  const double u0 = seed / std::sqrt(1.0 + mu * mu);
  return integrate_orbit(reaction, c, {0.0, u0, mu * u0}, EventSpec::all(), max_time, options).fate;
}

double heteroclinic_speed(const BistableReaction& reaction, std::pair<double, double> bracket, double tol,
                          const HeteroclinicOptions& options) {
  auto [lo, hi] = bracket;
  require(lo < hi, "heteroclinic_speed: bracket must satisfy c_lo < c_hi");
  require(tol > 0.0, "heteroclinic_speed: tol must be positive");
  auto below = [&](double c) {
    return is_reached_one(classify_unstable_orbit(reaction, c, options.seed, options.orbit, options.max_time));
  };
  const bool lo_below = below(lo);
  if (lo_below == below(hi)) {
    fail(ErrorKind::NoSolution, "heteroclinic_speed: unstable orbit has the same fate at c=" + fmt(lo) +
                                    " and c=" + fmt(hi));
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) == lo_below ? lo : hi) = mid;
  }
  const double speed = 0.5 * (lo + hi);

  if (options.verify_seed) {
    HeteroclinicOptions halved = options;
    halved.seed = 0.5 * options.seed;
    halved.verify_seed = false;
    const double other = heteroclinic_speed(reaction, bracket, tol, halved);
    if (std::abs(other - speed) > tol) {
      fail(ErrorKind::Numeric, "heteroclinic_speed: halving the unstable seed moved the speed by " +
                                   fmt(std::abs(other - speed)));
    }
  }
  return speed;
}

double heteroclinic_speed(const BistableReaction& reaction, double tol, const HeteroclinicOptions& options) {
  for (double w = 1.0; w <= 1024.0; w *= 2.0) {
    const bool lo = is_reached_one(classify_unstable_orbit(reaction, -w, options.seed, options.orbit, options.max_time));
    const bool hi = is_reached_one(classify_unstable_orbit(reaction, w, options.seed, options.orbit, options.max_time));
    if (lo != hi) return heteroclinic_speed(reaction, {-w, w}, tol, options);
  }
  fail(ErrorKind::NoSolution, "heteroclinic_speed: no bracket found in [-1024, 1024]");
}

StationaryProfile StationaryProfile::placed_at(double new_a) const {
  StationaryProfile p = *this;
  p.a = new_a;
  p.b = new_a + trace.travel_time;
  return p;
}

namespace {

std::size_t locate_sample(const std::vector<OrbitSample>& s, double xi) {
  auto it = std::upper_bound(s.begin(), s.end(), xi, [](double x, const OrbitSample& o) { return x < o.xi; });
  std::size_t i = static_cast<std::size_t>(std::distance(s.begin(), it));
  if (i == 0) return 0;
  return std::min(i - 1, s.size() - 2);
}

double checked_xi(const StationaryProfile& p, double x) {
  const double xi = x - p.a;
  const double span = p.trace.travel_time;
  const double slack = 1e-9 * std::max(1.0, span);
  if (xi < -slack || xi > span + slack) {
    fail(ErrorKind::Domain, "profile evaluated at x=" + fmt(x) + " outside [" + fmt(p.a) + ", " + fmt(p.b) + "]");
  }
  return std::clamp(xi, 0.0, span);
}

}  // namespace

double StationaryProfile::value(double x) const {
  const double xi = checked_xi(*this, x);
  const auto& s = trace.samples;
  const std::size_t i = locate_sample(s, xi);
  const double h = s[i + 1].xi - s[i].xi;
  if (h <= 0.0) return s[i].u;
  const double t = (xi - s[i].xi) / h;
  double u;
  if (s[i].u <= 0.5 && s[i + 1].u <= 0.5) {
    u = hermite(t, h, s[i].u, s[i].v, s[i + 1].u, s[i + 1].v);
  } else {
    u = 1.0 - hermite(t, h, s[i].w, -s[i].v, s[i + 1].w, -s[i + 1].v);
  }
  if (u < 0.0 && u > -1e-12) u = 0.0;
  if (u > 1.0 && u < 1.0 + 1e-12) u = 1.0;
  return u;
}

double StationaryProfile::slope(double x) const {
  const double xi = checked_xi(*this, x);
  const auto& s = trace.samples;
  const std::size_t i = locate_sample(s, xi);
  const double h = s[i + 1].xi - s[i].xi;
  if (h <= 0.0) return s[i].v;
  return hermite((xi - s[i].xi) / h, h, s[i].v, s[i].dv, s[i + 1].v, s[i + 1].dv);
}

namespace {

enum class SymmetricFailure { None, LeftHalf, RightHalf };

struct SymmetricShot {
  SymmetricFailure failure = SymmetricFailure::None;
  double theta = 0.0;
  double excess = 0.0;
  HalfOrbit left, right;
};

// Length-r solution at speed c with equal end slopes theta; the halves are
// matched in U but not in V.
SymmetricShot symmetric_shot(const BistableReaction& reaction, double c, double r, const OrbitOptions& options,
                             double time_tol) {
  const double cap = 2.0 * r + 20.0;
  auto eval = [&](double s) {
    SymmetricShot e;
    e.theta = std::exp(s);
    e.left = left_half(reaction, c, e.theta, options, cap);
    e.right = right_half(reaction, c, e.theta, options, cap);
    if (!e.left.reached) e.failure = SymmetricFailure::LeftHalf;
    else if (!e.right.reached) e.failure = SymmetricFailure::RightHalf;
    e.excess = e.failure == SymmetricFailure::None ? e.left.time + e.right.time - r : cap - r;
    return e;
  };
  auto too_small = [](const SymmetricShot& e) { return e.failure != SymmetricFailure::None || e.excess > 0.0; };

  double s_hi = std::log(std::abs(c) + reaction.sup_norm() + 1.0);
  SymmetricShot hi = eval(s_hi);
  while (too_small(hi)) {
    if (s_hi > 230.0) fail(ErrorKind::NoSolution, "stationary_nonlocal: no short simple solution at c=" + fmt(c));
    s_hi += std::log(4.0);
    hi = eval(s_hi);
  }
  double s_lo = s_hi;
  SymmetricShot lo = hi;
  while (!too_small(lo)) {
    s_hi = s_lo;
    hi = std::move(lo);
    // theta below e^-300: V^2 in the energy integral would leave the normal range
    if (s_hi < -300.0) {
      fail(ErrorKind::NoSolution, "stationary_nonlocal: length r=" + fmt(r) + " not reached before theta underflow");
    }
    s_lo = s_hi - std::log(16.0);
    lo = eval(s_lo);
  }
  while (lo.failure != SymmetricFailure::None) {
    if (s_hi - s_lo < 1e-14 * std::max(1.0, std::abs(s_lo))) return lo;
    const double s = 0.5 * (s_lo + s_hi);
    SymmetricShot mid = eval(s);
    if (too_small(mid)) {
      s_lo = s;
      lo = std::move(mid);
    } else {
      s_hi = s;
      hi = std::move(mid);
    }
  }

  Illinois it{s_hi, hi.excess, s_lo, lo.excess};
  SymmetricShot best = std::abs(lo.excess) < std::abs(hi.excess) ? lo : hi;
  for (int k = 0; k < 200 && std::abs(best.excess) > time_tol && !it.collapsed(); ++k) {
    const double s = it.next();
    SymmetricShot e = eval(s);
    if (e.failure == SymmetricFailure::None && std::abs(e.excess) < std::abs(best.excess)) best = e;
    it.update(s, e.failure == SymmetricFailure::None ? e.excess : kNaN, !too_small(e));
  }
  return best;
}

}  // namespace

StationaryProfile stationary_nonlocal(const BistableReaction& reaction, double r, double tol,
                                      const StationaryOptions& options) {
  require(r > 0.0, "stationary_nonlocal: r must be positive");
  require(tol > 0.0, "stationary_nonlocal: tol must be positive");
  const double mass = reaction.mass_integral();
  constexpr double kTimeTol = 1e-11;

  // Outer unknown c. At a speed above lambda_r the right half arrives at U = 1/2
  // with the larger V (or the left half never gets there); below, the reverse.
  struct Eval {
    double c;
    bool above;
    double value;  // right.v - left.v, NaN when a half is missing
    SymmetricShot shot;
    std::string status;
  };
  auto eval = [&](double c) {
    Eval e{c, false, kNaN, symmetric_shot(reaction, c, r, options.orbit, kTimeTol), "ok"};
    switch (e.shot.failure) {
      case SymmetricFailure::LeftHalf:
        e.above = true;
        e.status = "left_half_stalls";
        break;
      case SymmetricFailure::RightHalf:
        e.above = false;
        e.status = "right_half_stalls";
        break;
      default:
        e.value = e.shot.right.v - e.shot.left.v;
        e.above = e.value > 0.0;
        break;
    }
    return e;
  };
  auto scan_row = [](const Eval& e) {
    if (std::isnan(e.value)) return ScanEntry{e.c, kNaN, kNaN, e.status};
    return ScanEntry{e.c, e.shot.theta, -e.value, e.status};
  };

  std::vector<ScanEntry> scan;
  std::optional<Eval> root;
  bool resolution_limited = false;

  if (mass == 0.0) {
    root = eval(0.0);
    scan.push_back(scan_row(*root));
    if (std::isnan(root->value)) throw StationaryNoSolution("stationary_nonlocal: no length-r solution at c=0", scan);
  } else {
    std::pair<double, double> bracket;
    if (options.bracket) {
      bracket = *options.bracket;
    } else {
      bool have = false;
      if (options.use_heteroclinic) {
        try {
          HeteroclinicOptions het;
          het.verify_seed = false;
          const double c_het = heteroclinic_speed(reaction, 1e-10, het);
          bracket = {c_het - 1.0, c_het + 1.0};
          have = true;
        } catch (const Error&) {
        }
      }
      if (!have) {
        const double w = 2.0 * reaction.sup_norm() * r;
        bracket = {-w, w};
      }
    }
    require(bracket.first < bracket.second, "stationary_nonlocal: invalid c bracket");

    const int n = std::max(2, options.scan_points);
    std::optional<Eval> below, above, prev;
    for (int i = 0; i < n; ++i) {
      const double c = bracket.first + (bracket.second - bracket.first) * i / (n - 1);
      Eval e = eval(c);
      scan.push_back(scan_row(e));
      if (prev && !below && !prev->above && e.above) {
        below = std::move(prev);
        above = e;
      }
      prev = std::move(e);
    }
    if (!below) {
      std::ostringstream os;
      os << "stationary_nonlocal: no sign change of the matching condition over c in [" << fmt(bracket.first)
         << ", " << fmt(bracket.second) << "] for r=" << fmt(r);
      throw StationaryNoSolution(os.str(), scan);
    }

    auto keep = [&](const Eval& e) {
      if (!std::isnan(e.value) && (!root || std::abs(e.value) < std::abs(root->value))) root = e;
    };
    keep(*below);
    keep(*above);
    Illinois it{below->c, below->value, above->c, above->value};
    for (int k = 0; k < 300; ++k) {
      if (root && std::abs(root->value) <= 1e-16) break;
      if (it.collapsed()) {
        resolution_limited = true;
        break;
      }
      const double c = it.next();
      Eval e = eval(c);
      keep(e);
      it.update(c, e.value, !e.above);
    }
    if (!root) throw StationaryNoSolution("stationary_nonlocal: the c bracket never produced a matched solution", scan);
  }

  SymmetricShot& shot = root->shot;
  StationaryProfile p;
  p.lambda_r = root->c;
  p.theta = shot.theta;
  p.trace = assemble(root->c, shot.theta, shot.theta, std::move(shot.left), std::move(shot.right));
  p.upsilon = p.theta;
  p.grad_l2_sq = p.trace.grad_l2_sq;
  p.normalization_shift = p.trace.xi_half;
  p.a = -p.trace.xi_half;
  p.b = p.trace.travel_time - p.trace.xi_half;
  p.slope_residual = p.trace.match_defect;
  p.identity_residual = p.lambda_r * p.grad_l2_sq + mass;
  p.resolution_limited = resolution_limited;
  p.scan = std::move(scan);
  if (!(p.slope_residual <= tol)) {
    fail(ErrorKind::Numeric, "stationary_nonlocal: matching defect " + fmt(p.slope_residual) + " exceeds tol " +
                                 fmt(tol) + " at r=" + fmt(r));
  }
  return p;
}


std::vector<double> profile_on_grid(const StationaryProfile& profile, const GridSpec& grid) {
  std::vector<double> out(static_cast<std::size_t>(grid.nodes()));
  for (int j = 0; j <= grid.cells; ++j) out[static_cast<std::size_t>(j)] = profile.value(grid.x(j));
  return out;
}

std::vector<double> profile_slope_on_grid(const StationaryProfile& profile, const GridSpec& grid) {
  std::vector<double> out(static_cast<std::size_t>(grid.nodes()));
  for (int j = 0; j <= grid.cells; ++j) out[static_cast<std::size_t>(j)] = profile.slope(grid.x(j));
  return out;
}

ReferenceProfile nagumo_exact_profile() {
  const double k = 1.0 / std::sqrt(2.0);
  return {[k](double x) { return 1.0 / (1.0 + std::exp(-k * x)); },
          [k](double x) {
            const double p = 1.0 / (1.0 + std::exp(-k * x));
            return k * p * (1.0 - p);
          }};
}

ProfileComparison compare_to_reference(const StationaryProfile& profile, const ReferenceProfile& reference,
                                       double pad, double h) {
  require(pad >= 0.0 && h > 0.0, "compare_to_reference: pad must be >= 0 and h > 0");
  const double lo = profile.a - pad, hi = profile.b + pad;
  const auto n = static_cast<long>(std::ceil((hi - lo) / h));
  const double step = (hi - lo) / static_cast<double>(n);
  double sup = 0.0, l2 = 0.0;
  for (long i = 0; i <= n; ++i) {
    const double x = i == n ? hi : lo + static_cast<double>(i) * step;
    double v, d;
    if (x < profile.a) {
      v = 0.0;
      d = 0.0;
    } else if (x > profile.b) {
      v = 1.0;
      d = 0.0;
    } else {
      v = profile.value(x);
      d = profile.slope(x);
    }
    sup = std::max(sup, std::abs(v - reference.value(x)));
    const double e = d - reference.slope(x);
    l2 += (i == 0 || i == n ? 0.5 : 1.0) * e * e;
  }
  return {sup, std::sqrt(l2 * step)};
}

}  // namespace wavefreeze::phaseplane
