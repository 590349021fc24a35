#include "wavefreeze/evolution.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tridiagonal.hpp"
#include "wavefreeze/errors.hpp"

namespace wavefreeze::evolution {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

double node_weight(const GridSpec& grid, int j) { return (j == 0 || j == grid.cells ? 0.5 : 1.0) * grid.dx(); }

// G^T y for the gradient stencil of gradient().
std::vector<double> gradient_transpose(const GridSpec& grid, const std::vector<double>& y) {
  const int m = grid.cells;
  const double s = 1.0 / (2.0 * grid.dx());
  std::vector<double> out(static_cast<std::size_t>(m + 1), 0.0);
  out[0] += -3.0 * s * y[0];
  out[1] += 4.0 * s * y[0];
  out[2] += -1.0 * s * y[0];
  for (int j = 1; j < m; ++j) {
    out[static_cast<std::size_t>(j - 1)] -= s * y[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(j + 1)] += s * y[static_cast<std::size_t>(j)];
  }
  const auto M = static_cast<std::size_t>(m);
  out[M - 2] += 1.0 * s * y[M];
  out[M - 1] += -4.0 * s * y[M];
  out[M] += 3.0 * s * y[M];
  return out;
}

void check_state(const GridSpec& grid, const std::vector<double>& v) {
  require(v.size() == static_cast<std::size_t>(grid.nodes()), "state length does not match the grid");
}

// Explicit part at interior nodes: lambda * centred v_x + f(v).
std::vector<double> explicit_part(const GridSpec& grid, const std::vector<double>& v,
                                  const BistableReaction& reaction, double lambda) {
  const int m = grid.cells;
  const double s = 1.0 / (2.0 * grid.dx());
  std::vector<double> n(v.size(), 0.0);
  for (int j = 1; j < m; ++j) {
    const auto i = static_cast<std::size_t>(j);
    n[i] = lambda * (v[i + 1] - v[i - 1]) * s + reaction.f_extended(v[i]);
  }
  return n;
}

// Solves (I - beta D) x = rhs on the interior with x_0 = 0, x_M = 1.
std::vector<double> implicit_diffusion(const GridSpec& grid, double beta, std::vector<double> rhs) {
  const int m = grid.cells;
  const double k = beta / (grid.dx() * grid.dx());
  const auto n = static_cast<std::size_t>(m - 1);
  std::vector<double> lower(n, -k), diag(n, 1.0 + 2.0 * k), upper(n, -k), b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = rhs[i + 1];
  b[n - 1] += k * 1.0;
  if (!detail::solve_tridiagonal(lower, diag, upper, b)) fail(ErrorKind::Numeric, "implicit diffusion solve failed");
  std::vector<double> x(rhs.size());
  x[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) x[i + 1] = b[i];
  x[static_cast<std::size_t>(m)] = 1.0;
  return x;
}

// D v at interior nodes (boundary rows 0).
std::vector<double> apply_diffusion(const GridSpec& grid, const std::vector<double>& v) {
  const int m = grid.cells;
  const double k = 1.0 / (grid.dx() * grid.dx());
  std::vector<double> d(v.size(), 0.0);
  for (int j = 1; j < m; ++j) {
    const auto i = static_cast<std::size_t>(j);
    d[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * k;
  }
  return d;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct StepResult {
  std::vector<double> v;
  std::vector<double> euler;  // IMEX-Euler companion, for the error estimate
};

StepResult imex_step(const GridSpec& grid, const std::vector<double>& v, const std::vector<double>& n0,
                     const BistableReaction& reaction, SpeedFunctional functional, double dt, bool with_euler) {
  std::vector<double> rhs(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) rhs[i] = v[i] + 0.5 * dt * n0[i];
  const std::vector<double> mid = implicit_diffusion(grid, 0.5 * dt, rhs);
  const std::vector<double> n_mid = explicit_part(grid, mid, reaction, lambda_of_state(grid, mid, reaction, functional));
  const std::vector<double> dv = apply_diffusion(grid, v);
  for (std::size_t i = 0; i < v.size(); ++i) rhs[i] = v[i] + 0.5 * dt * dv[i] + dt * n_mid[i];
  StepResult out{implicit_diffusion(grid, 0.5 * dt, rhs), {}};
  if (with_euler) {
    for (std::size_t i = 0; i < v.size(); ++i) rhs[i] = v[i] + dt * n0[i];
    out.euler = implicit_diffusion(grid, dt, rhs);
  }
  return out;
}

HistoryRow row_of(const EvolutionState& s, const std::vector<double>* reference) {
  const GradientNorms g = diagnostics(s.grid, s.v);
  HistoryRow row{s.t, s.lambda, s.gamma, g.l1, g.l2_sq};
  if (reference) {
    double e = 0.0;
    for (std::size_t i = 0; i < s.v.size(); ++i) e = std::max(e, std::abs(s.v[i] - (*reference)[i]));
    row.sup_err = e;
  }
  return row;
}

}  // namespace

const char* to_string(SpeedFunctional functional) {
  switch (functional) {
    case SpeedFunctional::Quotient:
      return "quotient";
    case SpeedFunctional::Potential:
      return "potential";
    case SpeedFunctional::IntegralMass:
      return "integral_mass";
  }
  return "unknown";
}

SpeedFunctional parse_functional(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "quotient") return SpeedFunctional::Quotient;
  if (s == "potential") return SpeedFunctional::Potential;
  if (s == "integral_mass" || s == "integralmass") return SpeedFunctional::IntegralMass;
  fail(ErrorKind::Config, "unknown speed functional '" + name + "'");
}

InitialData InitialData::from_profile(phaseplane::StationaryProfile profile) {
  InitialData d;
  d.kind = Kind::FromProfile;
  d.profile = std::make_shared<const phaseplane::StationaryProfile>(std::move(profile));
  return d;
}

InitialData InitialData::custom(std::vector<double> samples) {
  InitialData d;
  d.kind = Kind::Custom;
  d.samples = std::move(samples);
  return d;
}

std::vector<double> initial_values(const InitialData& data, const GridSpec& grid) {
  const double m = 0.5 * (grid.a + grid.b);
  const double J = 0.5 * (grid.b - grid.a);
  std::vector<double> v(static_cast<std::size_t>(grid.nodes()));
  switch (data.kind) {
    case InitialData::Kind::LinearRamp:
      for (int j = 0; j <= grid.cells; ++j) v[static_cast<std::size_t>(j)] = static_cast<double>(j) / grid.cells;
      break;
    case InitialData::Kind::SineMix:
      for (int j = 0; j <= grid.cells; ++j) {
        const double y = (grid.x(j) - m) / J;
        v[static_cast<std::size_t>(j)] = 0.5 * (1.0 + 0.53 * y + 0.47 * std::sin(-1.5 * std::numbers::pi * y));
      }
      break;
    case InitialData::Kind::Step:
      require(data.lo >= 0.0 && data.lo <= 1.0 && data.hi >= 0.0 && data.hi <= 1.0,
              "step initial data must take values in [0,1]");
      for (int j = 0; j <= grid.cells; ++j) {
        const double x = grid.x(j);
        v[static_cast<std::size_t>(j)] = x < m ? data.lo : (x > m ? data.hi : 0.5 * (data.lo + data.hi));
      }
      break;
    case InitialData::Kind::FromProfile:
      require(static_cast<bool>(data.profile), "FromProfile initial data without a profile");
      v = phaseplane::profile_on_grid(*data.profile, grid);
      break;
    case InitialData::Kind::Custom:
      require(data.samples.size() == v.size(), "custom initial data must have one sample per grid node");
      v = data.samples;
      break;
  }
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::Domain, "initial data outside [0,1]: " + fmt(x));
  }
  v.front() = 0.0;
  v.back() = 1.0;
  return v;
}

std::vector<double> gradient(const GridSpec& grid, const std::vector<double>& v) {
  check_state(grid, v);
  const int m = grid.cells;
  const double s = 1.0 / (2.0 * grid.dx());
  std::vector<double> g(v.size());
  g[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * s;
  for (int j = 1; j < m; ++j) {
    const auto i = static_cast<std::size_t>(j);
    g[i] = (v[i + 1] - v[i - 1]) * s;
  }
  const auto M = static_cast<std::size_t>(m);
  g[M] = (3.0 * v[M] - 4.0 * v[M - 1] + v[M - 2]) * s;
  return g;
}

double trapezoid(const GridSpec& grid, const std::vector<double>& values) {
  check_state(grid, values);
  double sum = 0.0;
  for (int j = 0; j <= grid.cells; ++j) sum += node_weight(grid, j) * values[static_cast<std::size_t>(j)];
  return sum;
}

GradientNorms diagnostics(const GridSpec& grid, const std::vector<double>& v) {
  const std::vector<double> g = gradient(grid, v);
  double l1 = 0.0, l2 = 0.0;
  for (int j = 0; j <= grid.cells; ++j) {
    const double w = node_weight(grid, j), x = g[static_cast<std::size_t>(j)];
    l1 += w * std::abs(x);
    l2 += w * x * x;
  }
  return {l1, l2};
}

double lambda_of_state(const GridSpec& grid, const std::vector<double>& v, const BistableReaction& reaction,
                       SpeedFunctional functional) {
  check_state(grid, v);
  if (functional == SpeedFunctional::IntegralMass) {
    double sum = 0.0;
    for (int j = 0; j <= grid.cells; ++j) sum += node_weight(grid, j) * reaction.f_extended(v[static_cast<std::size_t>(j)]);
    return -sum;
  }
  const std::vector<double> g = gradient(grid, v);
  double q = 0.0, p = 0.0;
  for (int j = 0; j <= grid.cells; ++j) {
    const auto i = static_cast<std::size_t>(j);
    const double w = node_weight(grid, j);
    q += w * g[i] * g[i];
    if (functional == SpeedFunctional::Quotient) p += w * reaction.f_extended(v[i]) * g[i];
  }
  if (!(q > kDegenerateGradient)) {
    fail(ErrorKind::Degenerate, "gradient norm squared " + fmt(q) + " is below the degeneracy threshold");
  }
  if (functional == SpeedFunctional::Potential) return -reaction.mass_integral() / q;
  return -p / q;
}

std::vector<double> lambda_gradient(const GridSpec& grid, const std::vector<double>& v,
                                    const BistableReaction& reaction, SpeedFunctional functional) {
  check_state(grid, v);
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.0);
  if (functional == SpeedFunctional::IntegralMass) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = -node_weight(grid, static_cast<int>(i)) * reaction.f_prime(std::clamp(v[i], 0.0, 1.0));
    }
    return out;
  }
  const std::vector<double> g = gradient(grid, v);
  std::vector<double> wg(n), wf(n);
  double q = 0.0, p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = node_weight(grid, static_cast<int>(i));
    wg[i] = w * g[i];
    wf[i] = w * reaction.f_extended(v[i]);
    q += w * g[i] * g[i];
    p += wf[i] * g[i];
  }
  if (!(q > kDegenerateGradient)) fail(ErrorKind::Degenerate, "gradient norm squared below the degeneracy threshold");
  std::vector<double> dq = gradient_transpose(grid, wg);
  for (double& x : dq) x *= 2.0;
  if (functional == SpeedFunctional::Potential) {
    const double k = reaction.mass_integral() / (q * q);
    for (std::size_t i = 0; i < n; ++i) out[i] = k * dq[i];
    return out;
  }
  std::vector<double> dp = gradient_transpose(grid, wf);
  for (std::size_t i = 0; i < n; ++i) {
    dp[i] += wg[i] * reaction.f_prime(std::clamp(v[i], 0.0, 1.0));
    out[i] = -dp[i] / q + p * dq[i] / (q * q);
  }
  return out;
}

std::vector<double> semidiscrete_rhs(const GridSpec& grid, const std::vector<double>& v,
                                     const BistableReaction& reaction, double lambda) {
  check_state(grid, v);
  std::vector<double> out = explicit_part(grid, v, reaction, lambda);
  const std::vector<double> d = apply_diffusion(grid, v);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
  return out;
}

std::vector<double> semidiscrete_rhs(const GridSpec& grid, const std::vector<double>& v,
                                     const BistableReaction& reaction, SpeedFunctional functional) {
  return semidiscrete_rhs(grid, v, reaction, lambda_of_state(grid, v, reaction, functional));
}

EvolutionState make_state(const GridSpec& grid, std::vector<double> v, const BistableReaction& reaction,
                          SpeedFunctional functional) {
  check_state(grid, v);
  EvolutionState s;
  s.grid = grid;
  v.front() = 0.0;
  v.back() = 1.0;
  s.v = std::move(v);
  s.lambda = lambda_of_state(grid, s.v, reaction, functional);
  const auto [lo, hi] = std::minmax_element(s.v.begin(), s.v.end());
  s.min_v = *lo;
  s.max_v = *hi;
  return s;
}

EvolutionState step(const EvolutionState& state, const BistableReaction& reaction, SpeedFunctional functional,
                    double dt) {
  require(dt > 0.0, "step: dt must be positive");
  const std::vector<double> n0 = explicit_part(state.grid, state.v, reaction, state.lambda);
  StepResult r = imex_step(state.grid, state.v, n0, reaction, functional, dt, false);
  if (!all_finite(r.v)) fail(ErrorKind::Numeric, "step produced a non-finite state");
  EvolutionState next = state;
  next.v = std::move(r.v);
  next.t = state.t + dt;
  next.lambda = lambda_of_state(next.grid, next.v, reaction, functional);
  next.gamma = state.gamma + 0.5 * dt * (state.lambda + next.lambda);
  next.accepted_steps = state.accepted_steps + 1;
  const auto [lo, hi] = std::minmax_element(next.v.begin(), next.v.end());
  next.min_v = std::min(state.min_v, *lo);
  next.max_v = std::max(state.max_v, *hi);
  return next;
}

EvolutionState evolve(const BistableReaction& reaction, const GridSpec& grid, const InitialData& initial,
                      SpeedFunctional functional, double T, const StepControl& control,
                      const std::vector<double>* reference) {
  EvolutionState s = make_state(grid, initial_values(initial, grid), reaction, functional);
  if (reference) require(reference->size() == s.v.size(), "evolve: reference length does not match the grid");
  s.history.push_back(row_of(s, reference));
  return evolve_from(std::move(s), reaction, functional, T, control, reference);
}

EvolutionState evolve_from(EvolutionState s, const BistableReaction& reaction, SpeedFunctional functional, double T,
                           const StepControl& control, const std::vector<double>* reference) {
  require(T >= s.t, "evolve: final time precedes the current time");
  require(control.atol > 0.0 && control.rtol >= 0.0, "evolve: tolerances must be positive");
  require(control.dt_max > 0.0 && control.record_every >= 1, "evolve: invalid step control");
  if (reference) require(reference->size() == s.v.size(), "evolve: reference length does not match the grid");
  const GridSpec& grid = s.grid;
  const double dx = grid.dx();
  double h = control.dt_initial > 0.0 ? control.dt_initial : 0.25 * dx * dx;
  h = std::min(h, control.dt_max);
  double err_prev = 1.0;
  constexpr double kOrder = 2.0;
  const auto interior = static_cast<double>(grid.cells - 1);

  std::vector<double> n0 = explicit_part(grid, s.v, reaction, s.lambda);
  long steps = 0;
  while (s.t < T) {
    if (++steps > control.max_steps) fail(ErrorKind::Numeric, "evolve: step budget exhausted at t=" + fmt(s.t));
    const bool last = h >= T - s.t;
    const double dt = last ? T - s.t : h;

    StepResult r = imex_step(grid, s.v, n0, reaction, functional, dt, true);
    double err = 0.0;
    bool finite = all_finite(r.v) && all_finite(r.euler);
    if (finite) {
      double sum = 0.0;
      for (int j = 1; j < grid.cells; ++j) {
        const auto i = static_cast<std::size_t>(j);
        const double sc = control.atol + control.rtol * std::max(std::abs(s.v[i]), std::abs(r.v[i]));
        const double e = (r.v[i] - r.euler[i]) / sc;
        sum += e * e;
      }
      err = std::sqrt(sum / interior);
      finite = std::isfinite(err);
    }
    if (!finite) {
      ++s.rejected_steps;
      h = dt * 0.25;
      if (h < control.dt_min) fail(ErrorKind::Numeric, "evolve: non-finite state at t=" + fmt(s.t));
      continue;
    }
    if (err > 1.0) {
      ++s.rejected_steps;
      h = dt * std::max(0.2, 0.9 * std::pow(err, -1.0 / kOrder));
      if (h < control.dt_min) fail(ErrorKind::Numeric, "evolve: step size underflow at t=" + fmt(s.t));
      continue;
    }
    const auto [lo, hi] = std::minmax_element(r.v.begin(), r.v.end());
    if (*lo < -control.bound_tol || *hi > 1.0 + control.bound_tol) {
      ++s.rejected_steps;
      ++s.bound_rejections;
      h = dt * 0.25;
      if (h < control.dt_min) {
        fail(ErrorKind::Numeric, "evolve: state leaves [0,1] beyond tolerance at t=" + fmt(s.t) + " (min " +
                                     fmt(*lo) + ", max " + fmt(*hi) + ")");
      }
      continue;
    }

    const double lambda_new = lambda_of_state(grid, r.v, reaction, functional);
    s.gamma += 0.5 * dt * (s.lambda + lambda_new);
    s.lambda = lambda_new;
    s.v = std::move(r.v);
    s.t = last ? T : s.t + dt;
    s.min_v = std::min(s.min_v, *std::min_element(s.v.begin(), s.v.end()));
    s.max_v = std::max(s.max_v, *std::max_element(s.v.begin(), s.v.end()));
    ++s.accepted_steps;
    n0 = explicit_part(grid, s.v, reaction, s.lambda);
    if (last || s.accepted_steps % control.record_every == 0) s.history.push_back(row_of(s, reference));

    const double e = std::max(err, 1e-10);
    double factor = 0.9 * std::pow(e, -0.7 / kOrder) * std::pow(err_prev, 0.4 / kOrder);
    factor = std::clamp(factor, 0.2, 5.0);
    err_prev = e;
    h = std::min(dt * factor, control.dt_max);
  }
  if (s.history.empty() || s.history.back().t != s.t) s.history.push_back(row_of(s, reference));
  return s;
}

double fit_decay_slope(const std::vector<HistoryRow>& history, double c_ref, double t_from, double t_to) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& row : history) {
    const double e = std::abs(row.lambda - c_ref);
    if (row.t < t_from || row.t > t_to || !(e > 0.0)) continue;
    const double y = std::log(e);
    n += 1;
    sx += row.t;
    sy += y;
    sxx += row.t * row.t;
    sxy += row.t * y;
  }
  const double det = n * sxx - sx * sx;
  return n >= 2 && det > 0.0 ? (n * sxy - sx * sy) / det : std::numeric_limits<double>::quiet_NaN();
}

SpeedErrorSeries speed_error_series(const std::vector<HistoryRow>& history, double c_ref) {
  require(!history.empty(), "speed_error_series: empty history");
  SpeedErrorSeries out;
  out.t.reserve(history.size());
  out.error.reserve(history.size());
  for (const auto& row : history) {
    out.t.push_back(row.t);
    out.error.push_back(std::abs(row.lambda - c_ref));
  }
  const double t0 = history.front().t, t1 = history.back().t;
  out.decay_slope = fit_decay_slope(history, c_ref, t0 + 0.5 * (t1 - t0), t1);
  return out;
}

DiscreteStationary discrete_stationary(const BistableReaction& reaction, const GridSpec& grid,
                                       SpeedFunctional functional, std::vector<double> v, double tol,
                                       int max_iterations) {
  check_state(grid, v);
  v.front() = 0.0;
  v.back() = 1.0;
  const int m = grid.cells;
  const auto n = static_cast<std::size_t>(m - 1);
  const double dx = grid.dx(), k = 1.0 / (dx * dx), s = 1.0 / (2.0 * dx);

  // Pin the node closest to the 1/2 crossing of the guess; lambda becomes a
  // free unknown (bordered Newton) and must agree with the functional at the end.
  std::size_t pin = 1;
  for (std::size_t j = 1; j <= n; ++j) {
    if (std::abs(v[j] - 0.5) < std::abs(v[pin] - 0.5)) pin = j;
  }
  const double pin_value = v[pin];
  double lambda = lambda_of_state(grid, v, reaction, functional);

  double residual = 0.0;
  double update = 1.0;
  for (int it = 0; it <= max_iterations; ++it) {
    const std::vector<double> F = semidiscrete_rhs(grid, v, reaction, lambda);
    residual = 0.0;
    for (std::size_t i = 1; i <= n; ++i) residual = std::max(residual, std::abs(F[i]));
    // Rounding in the second difference grows like eps / dx^2, so a vanishing
    // Newton update also counts as convergence.
    if (residual <= tol || update <= 1e-15) {
      const double functional_lambda = lambda_of_state(grid, v, reaction, functional);
      return {std::move(v), functional_lambda, lambda, residual, it};
    }
    if (it == max_iterations) break;

    std::vector<double> lower(n), diag(n), upper(n), y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + 1;
      lower[i] = k - lambda * s;
      upper[i] = k + lambda * s;
      diag[i] = -2.0 * k + reaction.f_prime(std::clamp(v[j], 0.0, 1.0));
      y[i] = -F[j];
      z[i] = (v[j + 1] - v[j - 1]) * s;
    }
    if (!detail::solve_tridiagonal(lower, diag, upper, y) || !detail::solve_tridiagonal(lower, diag, upper, z)) {
      fail(ErrorKind::Numeric, "discrete_stationary: singular tridiagonal part");
    }
    const std::size_t p = pin - 1;
    if (z[p] == 0.0 || !std::isfinite(z[p])) fail(ErrorKind::Numeric, "discrete_stationary: singular bordered system");
    const double dlambda = (y[p] - (pin_value - v[pin])) / z[p];
    update = std::abs(dlambda);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = y[i] - z[i] * dlambda;
      v[i + 1] += d;
      update = std::max(update, std::abs(d));
    }
    lambda += dlambda;
    if (!all_finite(v) || !std::isfinite(lambda)) fail(ErrorKind::Numeric, "discrete_stationary: Newton iterate is not finite");
  }
  fail(ErrorKind::Numeric, "discrete_stationary: no convergence, residual " + fmt(residual));
}

}  // namespace wavefreeze::evolution
