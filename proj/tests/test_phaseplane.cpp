#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <variant>

#include "wavefreeze/phaseplane.hpp"

using namespace wavefreeze;
using namespace wavefreeze::phaseplane;

namespace {

const double kCStar = -std::sqrt(2.0) / 4;

BistableReaction nagumo() { return BistableReaction::nagumo(0.25); }

SimpleSolutionTrace synthetic(const std::vector<OrbitSample>& samples) {
  SimpleSolutionTrace t;
  t.samples = samples;
  t.travel_time = samples.back().xi - samples.front().xi;
  return t;
}

// Root of F(u) = int_0^u s(1-s)(s-a) ds = E in (a, 1), by bisection on the closed form.
double energy_level(double a, double e) {
  auto F = [a](double u) { return -a * u * u / 2 + (1 + a) * u * u * u / 3 - u * u * u * u / 4; };
  double lo = a, hi = 0.9;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) < e ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("orbit started at the interior equilibrium stays there") {
  auto r = nagumo();
  auto orbit = integrate_orbit(r, 0.3, {0.0, 0.25, 0.0}, EventSpec::all(), 50.0);
  REQUIRE(std::holds_alternative<Unresolved>(orbit.fate));
  for (const auto& s : orbit.samples) {
    CHECK(s.u == 0.25);
    CHECK(s.v == 0.0);
  }
}

TEST_CASE("fast launch reaches one") {
  auto r = nagumo();
  auto orbit = integrate_orbit(r, 0.0, {0.0, 0.0, 2.0}, EventSpec::all(), 100.0);
  REQUIRE(std::holds_alternative<ReachedOne>(orbit.fate));
  // at c = 0, V^2/2 + int_0^U f is conserved
  const double ups = std::get<ReachedOne>(orbit.fate).upsilon;
  CHECK(ups >= 2 - r.sup_norm());
  CHECK(ups == doctest::Approx(std::sqrt(4 - 2 * r.mass_integral())).epsilon(1e-9));
}

TEST_CASE("slow launch turns back past alpha at the energy level") {
  auto r = nagumo();
  const double theta = 1e-4;
  auto orbit = integrate_orbit(r, 0.0, {0.0, 0.0, theta}, EventSpec::all(), 1e4);
  REQUIRE(std::holds_alternative<HitVZero>(orbit.fate));
  const double u = std::get<HitVZero>(orbit.fate).u_at_stop;
  CHECK(u > 0.25);
  CHECK(u == doctest::Approx(energy_level(0.25, theta * theta / 2)).epsilon(1e-8));
  CHECK(u == doctest::Approx(0.3924).epsilon(1e-4));
}

TEST_CASE("simple solution trace") {
  auto r = nagumo();
  const double theta = r.sup_norm() + 1;
  auto out = trace_simple_solution(r, 0.0, theta);
  REQUIRE(out.trace);
  const auto& t = *out.trace;
  CHECK(t.samples.front().u == 0.0);
  CHECK(std::abs(t.samples.back().u - 1.0) <= 1e-10);
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    const auto& s = t.samples[i];
    CHECK(s.v > 0.0);
    if (i > 0) CHECK(s.u > t.samples[i - 1].u);
    CHECK(s.v >= theta - r.sup_norm() * s.u - 1e-12);
  }
  CHECK(t.travel_time == doctest::Approx(t.samples.back().xi - t.samples.front().xi).epsilon(1e-12));

  CHECK_THROWS_AS(trace_simple_solution(r, 0.0, 0.0), Error);
  CHECK_THROWS_AS(trace_simple_solution(r, 0.0, -1.0), Error);
}

TEST_CASE("trace near the front follows the exact orbit graph") {
  // Phi' = Phi (1 - Phi) / sqrt 2 along the exact front
  auto r = nagumo();
  auto out = trace_simple_solution(r, kCStar, 1e-6);
  REQUIRE(out.trace);
  for (double u : {0.2, 0.5, 0.8}) {
    CHECK(orbit_graph_value(*out.trace, u) == doctest::Approx(u * (1 - u) / std::sqrt(2.0)).epsilon(1e-4));
  }
  CHECK(out.trace->upsilon == doctest::Approx(1e-6).epsilon(0.2));
}

TEST_CASE("travel time quadrature on synthetic traces") {
  // P = 1: U = xi
  std::vector<OrbitSample> flat;
  for (double u : {0.0, 0.25, 0.5, 0.75, 1.0}) flat.push_back({u, u, 1 - u, 1.0, 0.0, 0.0});
  CHECK(travel_time_quadrature(synthetic(flat)) == doctest::Approx(1.0).epsilon(1e-14));

  // P = 1 + U: U = e^xi - 1, V' = V
  std::vector<OrbitSample> lin;
  for (double u : {0.0, 0.2, 0.5, 0.7, 1.0}) lin.push_back({std::log1p(u), u, 1 - u, 1 + u, 1 + u, 1 + u});
  CHECK(travel_time_quadrature(synthetic(lin)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("travel time quadrature agrees with the orbit span") {
  auto r = nagumo();
  for (double c : {-0.5, kCStar, 0.0, 0.4}) {
    for (double theta : {0.05, 0.3, 1.0, 3.0}) {
      auto out = trace_simple_solution(r, c, theta);
      if (!out.trace) continue;
      CHECK(std::abs(travel_time_quadrature(*out.trace) - out.trace->travel_time) <= 1e-8);
    }
  }
  OrbitOptions tight{ode::Tolerance{1e-12, 1e-12}};
  auto shot = shoot_theta_for_length(r, 0.0, 80.0, tight);
  CHECK(std::abs(travel_time_quadrature(shot.trace) - shot.trace.travel_time) <= 1e-8);
}

TEST_CASE("non-crossing of simple solutions") {
  auto r = nagumo();
  for (double c : {kCStar, 0.0, 0.3}) {
    auto lo = trace_simple_solution(r, c, 0.6);
    auto hi = trace_simple_solution(r, c, 0.7);
    REQUIRE(lo.trace);
    REQUIRE(hi.trace);
    for (int k = 0; k <= 99; ++k) {
      const double u = k / 99.0;
      CHECK(orbit_graph_value(*lo.trace, u) < orbit_graph_value(*hi.trace, u));
    }
  }
}

TEST_CASE("slope comparison at a common point") {
  auto r = nagumo();
  for (double u = 0.0; u <= 1.0; u += 0.05) {
    for (double p : {1e-3, 0.1, 1.0, 10.0}) {
      CHECK(orbit_graph_slope(r, -0.4, u, p) > orbit_graph_slope(r, 0.1, u, p));
      CHECK(orbit_graph_slope(r, kCStar, u, p) == doctest::Approx(-kCStar - r.f(u) / p));
    }
  }
  // at a numerically constructed crossing of two orbit graphs
  auto slow = trace_simple_solution(r, -1.0, 0.3);
  auto fast = trace_simple_solution(r, 0.5, 0.8);
  REQUIRE(slow.trace);
  REQUIRE(fast.trace);
  auto diff = [&](double u) { return orbit_graph_value(*slow.trace, u) - orbit_graph_value(*fast.trace, u); };
  REQUIRE(diff(0.0) * diff(1.0) < 0);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((diff(mid) > 0) == (diff(lo) > 0) ? lo : hi) = mid;
  }
  const double u = 0.5 * (lo + hi);
  const double p = orbit_graph_value(*slow.trace, u);
  CHECK(std::abs(p - orbit_graph_value(*fast.trace, u)) <= 1e-12);
  CHECK(orbit_graph_slope(r, -1.0, u, p) > orbit_graph_slope(r, 0.5, u, p));
}

TEST_CASE("lower bound for fast launches") {
  auto r = nagumo();
  for (double c : {-0.6, kCStar, 0.0, 0.5}) {
    const double theta = std::abs(c) + r.sup_norm() + 1;
    for (double t : {theta, 1.5 * theta, 4 * theta}) {
      auto out = trace_simple_solution(r, c, t);
      REQUIRE(out.trace);
      for (const auto& s : out.trace->samples) CHECK(s.v >= t - (std::abs(c) + r.sup_norm()) * s.u - 1e-12);
    }
  }
}

TEST_CASE("end slope below launch slope for positive speeds") {
  auto r = nagumo();
  const double theta0 = 1.0;
  int simple = 0;
  for (double c : {0.1, 0.5, 2.0}) {
    REQUIRE(c > r.sup_norm() / theta0);
    for (double theta : {1.01, 2.0, 5.0}) {
      auto out = trace_simple_solution(r, c, theta);
      if (!out.trace) continue;
      ++simple;
      CHECK(out.trace->upsilon < theta);
    }
  }
  CHECK(simple >= 6);
}

TEST_CASE("shooting for a prescribed length") {
  auto r = nagumo();
  OrbitOptions tight{ode::Tolerance{1e-12, 1e-12}};
  auto s80 = shoot_theta_for_length(r, 0.0, 80.0, tight);
  CHECK(std::abs(s80.trace.travel_time - 80.0) <= 1e-9);
  auto s40 = shoot_theta_for_length(r, 0.0, 40.0, tight);
  auto s20 = shoot_theta_for_length(r, 0.0, 20.0, tight);
  auto s10 = shoot_theta_for_length(r, 0.0, 10.0, tight);
  CHECK(s40.theta >= s80.theta);
  CHECK(s20.theta > s40.theta);
  CHECK(s10.theta > s20.theta);
  auto s01 = shoot_theta_for_length(r, 0.0, 0.1, tight);
  CHECK(s01.theta > r.sup_norm() + 1);

  CHECK_THROWS_AS(shoot_theta_for_length(r, 0.0, -1.0, tight), Error);
}

TEST_CASE("heteroclinic speed") {
  CHECK(std::abs(heteroclinic_speed(nagumo(), 1e-8) - kCStar) <= 1e-6);
  CHECK(std::abs(heteroclinic_speed(BistableReaction::nagumo(0.3), 1e-8) + 0.2 * std::sqrt(2.0)) <= 1e-6);
  CHECK(std::abs(heteroclinic_speed(BistableReaction::nagumo(0.5), 1e-8)) <= 1e-6);
  CHECK(std::abs(heteroclinic_speed(nagumo(), {-1.0, 1.0}, 1e-8) - kCStar) <= 1e-6);
  CHECK_THROWS_AS(heteroclinic_speed(nagumo(), {0.0, 1.0}, 1e-8), Error);
}

TEST_CASE("unstable orbit fates on either side of the front speed") {
  auto r = nagumo();
  CHECK(std::holds_alternative<ReachedOne>(classify_unstable_orbit(r, kCStar - 0.05)));
  CHECK(std::holds_alternative<HitVZero>(classify_unstable_orbit(r, kCStar + 0.05)));
}

TEST_CASE("stationary profile at r = 40") {
  auto r = nagumo();
  const double tol = 1e-9;
  auto p = stationary_nonlocal(r, 40.0, tol);
  CHECK(std::abs(p.lambda_r - kCStar) <= 1e-5);
  CHECK(p.slope_residual <= tol);
  CHECK(std::abs(p.lambda_r * p.grad_l2_sq + r.mass_integral()) <= 10 * tol);
  CHECK(std::abs(p.identity_residual) <= 10 * tol);
  CHECK(std::abs(p.value(0.0) - 0.5) <= 1e-10);
  CHECK(p.length() == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(p.value(p.a) == 0.0);
  CHECK(p.value(p.b) == 1.0);
  CHECK(p.slope(p.a) == doctest::Approx(p.slope(p.b)).epsilon(1e-9));
  CHECK_THROWS_AS(p.value(p.b + 1.0), Error);
}

TEST_CASE("stationary solution does not depend on the speed bracket") {
  auto r = nagumo();
  StationaryOptions wide;
  wide.use_heteroclinic = false;
  wide.bracket = std::make_pair(-1.5, 0.5);
  StationaryOptions narrow;
  narrow.use_heteroclinic = false;
  narrow.bracket = std::make_pair(-0.36, -0.2);
  auto a = stationary_nonlocal(r, 20.0, 1e-10, wide);
  auto b = stationary_nonlocal(r, 20.0, 1e-10, narrow);
  CHECK(std::abs(a.lambda_r - b.lambda_r) <= 1e-9);
}

TEST_CASE("bracket without a sign change reports the scan") {
  StationaryOptions opts;
  opts.use_heteroclinic = false;
  opts.bracket = std::make_pair(0.5, 1.0);
  opts.scan_points = 8;
  try {
    stationary_nonlocal(nagumo(), 20.0, 1e-9, opts);
    FAIL("expected no solution");
  } catch (const StationaryNoSolution& e) {
    CHECK(e.kind() == ErrorKind::NoSolution);
    CHECK(e.scan().size() >= 2);
  }
}

TEST_CASE("balanced cubic has a standing profile") {
  auto p = stationary_nonlocal(BistableReaction::nagumo(0.5), 20.0);
  CHECK(p.lambda_r == 0.0);
  CHECK(p.slope(p.a) == doctest::Approx(p.slope(p.b)).epsilon(1e-9));
  CHECK(std::abs(p.value(0.0) - 0.5) <= 1e-10);
}

TEST_CASE("profile resampling") {
  auto p = stationary_nonlocal(nagumo(), 20.0);
  for (const auto& s : p.trace.samples) CHECK(std::abs(p.value(p.a + s.xi) - s.u) <= 1e-12);

  auto grid = GridSpec::from_cells(p.a, p.b, 200);
  auto v = profile_on_grid(p, grid);
  auto d = profile_slope_on_grid(p, grid);
  REQUIRE(v.size() == 201);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 1.0);
  for (std::size_t j = 1; j < v.size(); ++j) CHECK(v[j] > v[j - 1]);
  for (double s : d) CHECK(s > 0.0);

  auto outside = GridSpec::from_cells(p.a - 1, p.b, 200);
  CHECK_THROWS_AS(profile_on_grid(p, outside), Error);
}

TEST_CASE("profile converges to the exact front") {
  auto r = nagumo();
  auto self = compare_to_reference(stationary_nonlocal(r, 20.0),
                                   {[p = stationary_nonlocal(r, 20.0)](double x) {
                                      return x < p.a ? 0.0 : x > p.b ? 1.0 : p.value(x);
                                    },
                                    [p = stationary_nonlocal(r, 20.0)](double x) {
                                      return x < p.a || x > p.b ? 0.0 : p.slope(x);
                                    }});
  CHECK(self.sup_err == 0.0);
  CHECK(self.grad_l2_err == 0.0);

  double prev = 1.0;
  for (double len : {10.0, 20.0, 40.0, 80.0}) {
    auto p = stationary_nonlocal(r, len);
    auto cmp = compare_to_reference(p, nagumo_exact_profile());
    CHECK(cmp.sup_err <= prev);
    prev = cmp.sup_err;
    if (len == 80.0) {
      CHECK(cmp.sup_err <= 1e-5);
      CHECK(std::abs(p.grad_l2_sq - std::sqrt(2.0) / 12) <= 1e-4);
    }
  }
}
