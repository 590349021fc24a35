#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavefreeze/evolution.hpp"

using namespace wavefreeze;
using namespace wavefreeze::evolution;

namespace {

const double kCStar = -std::sqrt(2.0) / 4;

BistableReaction nagumo() { return BistableReaction::nagumo(0.25); }

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> exact_front(const GridSpec& grid) {
  std::vector<double> v(static_cast<std::size_t>(grid.nodes()));
  for (int j = 0; j <= grid.cells; ++j) v[j] = 1 / (1 + std::exp(-grid.x(j) / std::sqrt(2.0)));
  return v;
}

DiscreteStationary equilibrium(const GridSpec& grid, SpeedFunctional functional = SpeedFunctional::Quotient) {
  auto guess = exact_front(grid);
  guess.front() = 0.0;
  guess.back() = 1.0;
  return discrete_stationary(nagumo(), grid, functional, guess);
}

// Values at the nodes of `coarse` picked out of a state on a grid refined by `factor`.
std::vector<double> restrict_to(const std::vector<double>& fine, int factor) {
  std::vector<double> out;
  for (std::size_t j = 0; j < fine.size(); j += static_cast<std::size_t>(factor)) out.push_back(fine[j]);
  return out;
}

}  // namespace

TEST_CASE("grid") {
  auto g = GridSpec::symmetric(40, 0.1);
  CHECK(g.cells == 800);
  CHECK(g.x(0) == -40.0);
  CHECK(g.x(g.cells) == 40.0);
  CHECK(g.dx() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(GridSpec::from_cells(0, 1, 4), Error);
  CHECK_THROWS_AS(GridSpec::from_cells(1, 0, 16), Error);
}

TEST_CASE("initial data") {
  auto g = GridSpec::symmetric(40, 0.1);
  auto ramp = initial_values(InitialData::linear_ramp(), g);
  for (int j = 0; j <= g.cells; ++j) CHECK(ramp[j] == doctest::Approx((g.x(j) + 40) / 80).epsilon(1e-14));

  auto mix = initial_values(InitialData::sine_mix(), g);
  for (int j = 1; j < g.cells; ++j) {
    const double x = g.x(j);
    CHECK(mix[j] == doctest::Approx(0.5 * (1 + 0.53 * x / 40 + 0.47 * std::sin(-3 * std::numbers::pi * x / 80))));
  }
  CHECK(mix.front() == 0.0);
  CHECK(mix.back() == 1.0);

  auto step = initial_values(InitialData::step(0.2, 0.8), g);
  CHECK(step.front() == 0.0);
  CHECK(step[1] == 0.2);
  CHECK(step[400] == doctest::Approx(0.5));
  CHECK(step[799] == 0.8);
  CHECK(step.back() == 1.0);
}

TEST_CASE("speed functionals on simple states") {
  auto g = GridSpec::symmetric(40, 0.1);
  auto ramp = initial_values(InitialData::linear_ramp(), g);
  CHECK(std::abs(lambda_of_state(g, ramp, nagumo(), SpeedFunctional::Potential) + 10.0 / 3) <= 1e-10);
  CHECK(lambda_of_state(g, ramp, BistableReaction::nagumo(0.5), SpeedFunctional::Potential) == 0.0);

  auto front = exact_front(g);
  CHECK(std::abs(lambda_of_state(g, front, nagumo(), SpeedFunctional::Quotient) - kCStar) <= 5e-4);

  // IntegralMass: -int f(v) dx over the exact front is c* as well
  auto fine = GridSpec::symmetric(40, 0.025);
  CHECK(std::abs(lambda_of_state(fine, exact_front(fine), nagumo(), SpeedFunctional::IntegralMass) - kCStar) <= 1e-4);

  std::vector<double> flat(g.nodes(), 0.0);
  try {
    lambda_of_state(g, flat, nagumo(), SpeedFunctional::Quotient);
    FAIL("expected a degenerate state");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Degenerate);
  }
  CHECK(parse_functional("Potential") == SpeedFunctional::Potential);
  CHECK_THROWS_AS(parse_functional("mass"), Error);
}

TEST_CASE("gradient norms") {
  auto g = GridSpec::symmetric(40, 0.1);
  CHECK(diagnostics(g, initial_values(InitialData::linear_ramp(), g)).l1 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(diagnostics(g, exact_front(g)).l1 == doctest::Approx(1.0 - 2 / (1 + std::exp(40 / std::sqrt(2.0)))).epsilon(1e-12));
  auto fine = GridSpec::symmetric(40, 0.025);
  CHECK(std::abs(diagnostics(fine, exact_front(fine)).l2_sq - std::sqrt(2.0) / 12) <= 1e-4);
}

TEST_CASE("lambda gradient matches finite differences") {
  auto g = GridSpec::symmetric(10, 0.25);
  auto v = initial_values(InitialData::sine_mix(), g);
  for (auto functional : {SpeedFunctional::Quotient, SpeedFunctional::Potential, SpeedFunctional::IntegralMass}) {
    auto grad = lambda_gradient(g, v, nagumo(), functional);
    for (int j : {0, 1, 7, 20, 39, 40}) {
      auto p = v, m = v;
      const double h = 1e-6;
      p[j] += h;
      m[j] -= h;
      const double fd = (lambda_of_state(g, p, nagumo(), functional) - lambda_of_state(g, m, nagumo(), functional)) / (2 * h);
      CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("right-hand side") {
  auto r = nagumo();
  // truncation error of the centred stencil at the continuum profile
  double prev = 0.0;
  for (double dx : {0.2, 0.1, 0.05}) {
    auto g = GridSpec::symmetric(20, dx);
    auto v = exact_front(g);
    auto rhs = semidiscrete_rhs(g, v, r, kCStar);
    CHECK(rhs.front() == 0.0);
    CHECK(rhs.back() == 0.0);
    double m = 0.0;
    for (double x : rhs) m = std::max(m, std::abs(x));
    if (prev > 0.0) CHECK(prev / m == doctest::Approx(4.0).epsilon(0.05));
    prev = m;
  }

  // flat plateau at a zero of f
  auto g = GridSpec::symmetric(5, 0.5);
  std::vector<double> plateau(g.nodes(), 0.25);
  plateau.front() = 0.0;
  plateau.back() = 1.0;
  auto rhs = semidiscrete_rhs(g, plateau, r, 0.7);
  for (int j = 2; j < g.cells - 1; ++j) CHECK(rhs[j] == 0.0);

  // a small perturbation of the equilibrium decays in L2
  auto eg = GridSpec::symmetric(20, 0.1);
  auto eq = equilibrium(eg);
  auto v = eq.v;
  for (int j = 1; j < eg.cells; ++j) v[j] += 1e-3 * std::sin(std::numbers::pi * (eg.x(j) + 20) / 40);
  auto d = semidiscrete_rhs(eg, v, r, SpeedFunctional::Quotient);
  double rate = 0.0, norm = 0.0;
  for (int j = 0; j <= eg.cells; ++j) {
    rate += (v[j] - eq.v[j]) * d[j];
    norm += std::abs(d[j]);
  }
  CHECK(norm > 0.0);
  CHECK(rate < 0.0);
}

TEST_CASE("discrete stationary state") {
  auto g = GridSpec::symmetric(40, 0.1);
  auto eq = equilibrium(g);
  CHECK(eq.residual <= 1e-12);
  CHECK(std::abs(eq.lambda - eq.pinned_lambda) <= 1e-12);
  CHECK(std::abs(eq.lambda - kCStar) <= 1e-7);
  auto rhs = semidiscrete_rhs(g, eq.v, nagumo(), SpeedFunctional::Quotient);
  double m = 0.0;
  for (double x : rhs) m = std::max(m, std::abs(x));
  CHECK(m <= 1e-11);
}

TEST_CASE("single IMEX step") {
  auto r = nagumo();
  auto g = GridSpec::symmetric(40, 0.1);
  auto eq = equilibrium(g);
  auto s0 = make_state(g, eq.v, r, SpeedFunctional::Quotient);
  auto s1 = step(s0, r, SpeedFunctional::Quotient, 0.1);
  CHECK(sup_diff(s1.v, s0.v) <= 1e-10 * 0.1);
  CHECK(s1.v.front() == 0.0);
  CHECK(s1.v.back() == 1.0);
  CHECK(s1.t == doctest::Approx(0.1));
  CHECK(s1.gamma == doctest::Approx(0.05 * (s0.lambda + s1.lambda)).epsilon(1e-14));
  CHECK_THROWS_AS(step(s0, r, SpeedFunctional::Quotient, 0.0), Error);
}

TEST_CASE("IMEX step is second order in time") {
  auto r = nagumo();
  auto g = GridSpec::symmetric(10, 0.2);
  auto start = make_state(g, initial_values(InitialData::sine_mix(), g), r, SpeedFunctional::Quotient);
  auto run = [&](int n) {
    auto s = start;
    for (int i = 0; i < n; ++i) s = step(s, r, SpeedFunctional::Quotient, 1.0 / n);
    return s.v;
  };
  auto ref = run(1024);
  const double e1 = sup_diff(run(16), ref);
  const double e2 = sup_diff(run(32), ref);
  const double e3 = sup_diff(run(64), ref);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("T = 0 returns the projected initial data") {
  auto g = GridSpec::symmetric(40, 0.1);
  auto s = evolve(nagumo(), g, InitialData::step(0.2, 0.8), SpeedFunctional::Quotient, 0.0);
  CHECK(s.t == 0.0);
  CHECK(s.history.size() == 1);
  CHECK(s.v == initial_values(InitialData::step(0.2, 0.8), g));
}

TEST_CASE("the three initial data converge to the same-grid equilibrium") {
  auto r = nagumo();
  auto g = GridSpec::symmetric(40, 0.1);
  auto eq = equilibrium(g);
  for (const auto& init : {InitialData::linear_ramp(), InitialData::sine_mix(), InitialData::step(0.2, 0.8)}) {
    auto s = evolve(r, g, init, SpeedFunctional::Quotient, 150.0);
    CHECK(std::abs(s.lambda - eq.lambda) <= 1e-6);
    CHECK(std::abs(s.lambda - kCStar) <= 5e-3);
    CHECK(s.min_v >= -1e-9);
    CHECK(s.max_v <= 1 + 1e-9);
    for (const auto& row : s.history) CHECK(row.l2_grad_sq > 0.0);

    // gamma is the trapezoid rule over the recorded speeds
    double gamma = 0.0;
    for (std::size_t i = 1; i < s.history.size(); ++i)
      gamma += 0.5 * (s.history[i].t - s.history[i - 1].t) * (s.history[i].lambda + s.history[i - 1].lambda);
    CHECK(std::abs(s.gamma - gamma) <= 1e-8 * 150.0);
    CHECK(s.history.back().gamma == s.gamma);

    auto err = speed_error_series(s.history, s.lambda);
    CHECK(err.decay_slope < 0.0);
  }
}

TEST_CASE("equilibrium initial data stays put") {
  auto r = nagumo();
  auto g = GridSpec::symmetric(40, 0.1);
  auto eq = equilibrium(g);
  auto s = evolve(r, g, InitialData::custom(eq.v), SpeedFunctional::Quotient, 50.0, {}, &eq.v);
  CHECK(sup_diff(s.v, eq.v) <= 1e-7);
  double worst = 0.0;
  for (const auto& row : s.history) worst = std::max(worst, std::abs(row.lambda - eq.lambda));
  CHECK(worst <= 1e-12);
  CHECK(s.history.back().sup_err <= 1e-7);
}

TEST_CASE("grid refinement") {
  auto r = nagumo();
  std::vector<std::vector<double>> finals;
  std::vector<double> plateau;
  for (double dx : {0.1, 0.05, 0.025}) {
    auto s = evolve(r, GridSpec::symmetric(40, dx), InitialData::linear_ramp(), SpeedFunctional::Quotient, 150.0);
    finals.push_back(s.v);
    plateau.push_back(std::abs(s.lambda - kCStar));
  }
  const double d1 = sup_diff(finals[0], restrict_to(finals[1], 2));
  const double d2 = sup_diff(restrict_to(finals[1], 2), restrict_to(finals[2], 4));
  CHECK(d1 / d2 >= 3.0);
  CHECK(plateau[2] < plateau[0]);
  CHECK(plateau[0] / plateau[2] >= 3.0);
}

TEST_CASE("quotient and potential functionals agree to second order") {
  auto r = nagumo();
  std::vector<double> constants;
  for (double dx : {0.2, 0.1, 0.05}) {
    auto g = GridSpec::symmetric(40, dx);
    auto s = make_state(g, initial_values(InitialData::sine_mix(), g), r, SpeedFunctional::Quotient);
    double worst = 0.0;
    for (double t : {0.0, 5.0, 20.0, 60.0}) {
      if (t > 0.0) s = evolve_from(std::move(s), r, SpeedFunctional::Quotient, t);
      const double q = lambda_of_state(g, s.v, r, SpeedFunctional::Quotient);
      const double p = lambda_of_state(g, s.v, r, SpeedFunctional::Potential);
      worst = std::max(worst, std::abs(q - p));
    }
    constants.push_back(worst / (dx * dx));
  }
  CHECK(constants[1] / constants[0] == doctest::Approx(1.0).epsilon(0.25));
  CHECK(constants[2] / constants[1] == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("decay slope fit") {
  std::vector<HistoryRow> h;
  for (int i = 0; i <= 100; ++i) {
    const double t = i;
    h.push_back({t, -0.3 + 1e-2 * std::exp(-0.2 * t), 0.0, 1.0, 0.1});
  }
  CHECK(fit_decay_slope(h, -0.3, 50, 90) == doctest::Approx(-0.2).epsilon(1e-6));
  CHECK(speed_error_series(h, -0.3).decay_slope == doctest::Approx(-0.2).epsilon(1e-6));
  CHECK(std::isnan(fit_decay_slope(h, -0.3, 200, 300)));
}
