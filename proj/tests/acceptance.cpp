// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "wavefreeze/evolution.hpp"
#include "wavefreeze/harness.hpp"
#include "wavefreeze/phaseplane.hpp"
#include "wavefreeze/spectrum.hpp"

using namespace wavefreeze;
using reaction::BistableReaction;
namespace fs = std::filesystem;

namespace {

const double kCStar = -std::sqrt(2.0) / 4;

BistableReaction nagumo() { return BistableReaction::nagumo(0.25); }

struct Criterion {
  std::string name;
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> exact_front(const GridSpec& grid) {
  std::vector<double> v(static_cast<std::size_t>(grid.nodes()));
  for (int j = 0; j <= grid.cells; ++j) v[j] = 1 / (1 + std::exp(-grid.x(j) / std::sqrt(2.0)));
  v.front() = 0.0;
  v.back() = 1.0;
  return v;
}

// Bounds seen by every evolution run in this file.
double g_min_v = 0.0;
double g_max_v = 1.0;

evolution::EvolutionState tracked_evolve(const GridSpec& grid, const evolution::InitialData& init, double T) {
  auto s = evolution::evolve(nagumo(), grid, init, evolution::SpeedFunctional::Quotient, T);
  g_min_v = std::min(g_min_v, s.min_v);
  g_max_v = std::max(g_max_v, s.max_v);
  return s;
}

void exact_speed_recovery(Criterion& c) {
  const auto out = fs::temp_directory_path() / "wavefreeze_acceptance_speed";
  for (auto [alpha, expected] : {std::pair{0.25, kCStar}, {0.3, std::sqrt(2.0) * (0.3 - 0.5)}, {0.5, 0.0}}) {
    config::Config cfg;
    cfg.set("reaction.alpha", std::to_string(alpha));
    const auto t0 = std::chrono::steady_clock::now();
    auto run = harness::run(harness::Command::Speed, cfg, out);
    const double secs = seconds_since(t0);
    c.require(run.exit_code == 0, "speed exit code");
    if (run.exit_code != 0) continue;
    const double got = nlohmann::json::parse(run.summary_json)["c_star"].get<double>();
    c.detail << " alpha=" << alpha << ": err=" << std::abs(got - expected) << " (" << secs << " s)";
    c.require(std::abs(got - expected) <= 1e-6, "speed within 1e-6");
    c.require(secs < 5.0, "runtime < 5 s");
  }
  fs::remove_all(out);
}

phaseplane::StationaryProfile g_profile80;

void stationary_convergence(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> errs;
  for (double r : {10.0, 20.0, 40.0, 80.0}) {
    auto p = phaseplane::stationary_nonlocal(nagumo(), r);
    errs.push_back(std::abs(p.lambda_r - kCStar));
    c.detail << " r=" << r << ": " << errs.back();
    if (r == 80.0) g_profile80 = p;
  }
  const double secs = seconds_since(t0);
  c.detail << " (" << secs << " s)";
  for (std::size_t i = 1; i < errs.size(); ++i) c.require(errs[i] < errs[i - 1], "strictly decreasing");
  c.require(errs[2] <= 1e-5, "|lambda_40 - c*| <= 1e-5");
  c.require(secs < 30.0, "runtime < 30 s");
}

void triangulation(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  auto coarse = GridSpec::symmetric(40, 0.1);
  auto eq = evolution::discrete_stationary(nagumo(), coarse, evolution::SpeedFunctional::Quotient,
                                           exact_front(coarse));
  auto s1 = tracked_evolve(coarse, evolution::InitialData::linear_ramp(), 150.0);
  auto s2 = tracked_evolve(GridSpec::symmetric(40, 0.025), evolution::InitialData::linear_ramp(), 150.0);
  const double secs = seconds_since(t0);
  const double same_grid = std::abs(s1.lambda - eq.lambda);
  const double gap1 = std::abs(s1.lambda - kCStar);
  const double gap2 = std::abs(s2.lambda - kCStar);
  c.detail << " |evo - same grid|=" << same_grid << " |evo - c*|=" << gap1 << " at dx=0.1, " << gap2
           << " at dx=0.025, ratio " << gap1 / gap2 << " (" << secs << " s)";
  c.require(same_grid <= 1e-6, "same-grid agreement <= 1e-6");
  c.require(gap1 <= 5e-3, "|lambda - c*| <= 5e-3");
  c.require(gap1 / gap2 >= 3.0, "gap shrinks by >= 3");
  c.require(secs < 180.0, "runtime < 3 min");
}

void decay(Criterion& c) {
  const double T = 150.0;
  auto grid = GridSpec::symmetric(40, 0.1);
  auto profile = phaseplane::stationary_nonlocal(nagumo(), grid.b - grid.a);
  auto lin = spectrum::discrete_equilibrium(profile, spectrum::grid_for(profile, grid.dx()), nagumo());
  auto report = spectrum::eigenvalues(spectrum::assemble_nonlocal(lin, nagumo()));
  const double s_r = report.rightmost.real();
  const double next = report.eigenvalues[1].real();
  c.detail << " |s(80)|=" << std::abs(s_r) << ", next eigenvalue " << next << ";";
  const std::pair<const char*, evolution::InitialData> presets[] = {
      {"ramp", evolution::InitialData::linear_ramp()},
      {"sine", evolution::InitialData::sine_mix()},
      {"step", evolution::InitialData::step(0.2, 0.8)}};
  for (const auto& [name, init] : presets) {
    auto s = tracked_evolve(grid, init, T);
    const double slope = evolution::fit_decay_slope(s.history, s.lambda, 0.5 * T, 0.9 * T);
    const double ratio = std::abs(slope) / std::abs(s_r);
    c.detail << " " << name << " slope=" << slope << " rate/|s|=" << ratio
             << " rate/|next|=" << std::abs(slope) / std::abs(next);
    c.require(slope < 0.0, std::string(name) + " slope negative");
    c.require(ratio >= 0.5 && ratio <= 2.0, std::string(name) + " rate within factor 2 of |s(r)|");
  }
}

void profile_accuracy(Criterion& c) {
  auto cmp = phaseplane::compare_to_reference(g_profile80, phaseplane::nagumo_exact_profile());
  const double dgrad = std::abs(g_profile80.grad_l2_sq - std::sqrt(2.0) / 12);
  c.detail << " sup=" << cmp.sup_err << " |grad^2 - sqrt2/12|=" << dgrad;
  c.require(cmp.sup_err <= 1e-5, "sup <= 1e-5");
  c.require(dgrad <= 1e-4, "gradient norm within 1e-4");
}

void spectral_stability(Criterion& c) {
  double prev = INFINITY;
  for (double r : {10.0, 20.0, 40.0}) {
    auto profile = phaseplane::stationary_nonlocal(nagumo(), r);
    auto lin = spectrum::discrete_equilibrium(profile, spectrum::grid_for(profile, 0.05), nagumo());
    auto nl = spectrum::eigenvalues(spectrum::assemble_nonlocal(lin, nagumo()));
    auto lo = spectrum::eigenvalues(spectrum::assemble_local(lin, nagumo()));
    const double s = nl.rightmost.real();
    c.detail << " r=" << r << ": s=" << s << " local " << lo.rightmost.real();
    c.require(nl.rightmost_is_real && s < 0.0, "rightmost real and negative");
    c.require(nl.real_count_at_or_above(-1e-10) == 0, "no real eigenvalue >= -1e-10");
    c.require(std::abs(s) < prev, "|s(r)| decreasing");
    prev = std::abs(s);
    bool local_ok = true;
    for (auto z : lo.eigenvalues) local_ok = local_ok && z.real() < 0.0;
    c.require(local_ok, "local Re < 0");
    c.require(lo.max_abs_imag() <= 1e-8 * lo.scale, "local imaginary parts");
  }

  BistableReaction inert = BistableReaction::custom([](double) { return 0.0; }, [](double) { return 0.0; }, "inert");
  double worst = 0.0;
  for (int m : {16, 32, 64}) {
    spectrum::Linearization flat;
    flat.grid = GridSpec::from_cells(0.0, 1.0, m);
    flat.values.assign(static_cast<std::size_t>(m + 1), 0.5);
    flat.slopes.assign(static_cast<std::size_t>(m + 1), 0.0);
    auto rep = spectrum::eigenvalues(spectrum::assemble_local(flat, inert));
    const double h = 1.0 / m;
    for (int k = 1; k < m; ++k) {
      const double exact = -(4 / (h * h)) * std::pow(std::sin(k * std::numbers::pi / (2 * m)), 2);
      worst = std::max(worst, std::abs(rep.eigenvalues[k - 1] - spectrum::Complex(exact, 0)) / std::abs(exact));
    }
  }
  c.detail << " Laplacian rel err " << worst;
  c.require(worst <= 1e-10, "Laplacian spectrum to 1e-10");
}

void property_suites(Criterion& c) {
  using namespace phaseplane;
  auto r = nagumo();

  int crossings = 0;
  for (double speed : {kCStar, 0.0, 0.3}) {
    auto lo = trace_simple_solution(r, speed, 0.6);
    auto hi = trace_simple_solution(r, speed, 0.7);
    for (int k = 0; k <= 99; ++k)
      if (orbit_graph_value(*lo.trace, k / 99.0) >= orbit_graph_value(*hi.trace, k / 99.0)) ++crossings;
  }
  c.detail << " crossings=" << crossings;
  c.require(crossings == 0, "non-crossing");

  double quad = 0.0;
  for (double speed : {-0.5, kCStar, 0.0, 0.4})
    for (double theta : {0.05, 0.3, 1.0, 3.0}) {
      auto out = trace_simple_solution(r, speed, theta);
      if (out.trace) quad = std::max(quad, std::abs(travel_time_quadrature(*out.trace) - out.trace->travel_time));
    }
  c.detail << " quadrature=" << quad;
  c.require(quad <= 1e-8, "travel-time quadrature <= 1e-8");

  double lower = INFINITY;
  for (double speed : {-0.6, kCStar, 0.0, 0.5}) {
    const double k = std::abs(speed) + r.sup_norm();
    for (double theta : {k + 1, 1.5 * (k + 1), 4 * (k + 1)}) {
      auto out = trace_simple_solution(r, speed, theta);
      for (const auto& s : out.trace->samples) lower = std::min(lower, s.v - (theta - k * s.u));
    }
  }
  c.detail << " lower-bound margin=" << lower;
  c.require(lower >= -1e-12, "lower bound");

  auto p = stationary_nonlocal(r, 20.0);
  auto lin = spectrum::discrete_equilibrium(p, spectrum::grid_for(p, 0.1), r);
  auto nl = spectrum::assemble_nonlocal(lin, r);
  auto lo = spectrum::assemble_local(lin, r);
  // rank one: every row of the difference is a multiple of one reference row
  const int n = nl.n;
  std::vector<double> diff(nl.data.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = nl.data[i] - lo.data[i];
  int ref = 0;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    double norm = 0.0;
    for (int j = 0; j < n; ++j) norm += diff[i * n + j] * diff[i * n + j];
    if (norm > best) best = norm, ref = i;
  }
  double rank_defect = 0.0;
  for (int i = 0; i < n; ++i) {
    double dot = 0.0;
    for (int j = 0; j < n; ++j) dot += diff[i * n + j] * diff[ref * n + j];
    const double scale = dot / best;
    for (int j = 0; j < n; ++j) rank_defect = std::max(rank_defect, std::abs(diff[i * n + j] - scale * diff[ref * n + j]));
  }
  rank_defect /= std::sqrt(best);
  c.detail << " rank-one defect=" << rank_defect;
  c.require(rank_defect <= 1e-12, "rank-one correction");

  std::vector<double> constants;
  for (double dx : {0.2, 0.1, 0.05}) {
    auto g = GridSpec::symmetric(40, dx);
    auto s = evolution::make_state(g, evolution::initial_values(evolution::InitialData::sine_mix(), g), r,
                                   evolution::SpeedFunctional::Quotient);
    double worst = 0.0;
    for (double t : {0.0, 5.0, 20.0, 60.0}) {
      if (t > 0.0) s = evolution::evolve_from(std::move(s), r, evolution::SpeedFunctional::Quotient, t);
      const double q = evolution::lambda_of_state(g, s.v, r, evolution::SpeedFunctional::Quotient);
      const double pot = evolution::lambda_of_state(g, s.v, r, evolution::SpeedFunctional::Potential);
      worst = std::max(worst, std::abs(q - pot));
    }
    g_min_v = std::min(g_min_v, s.min_v);
    g_max_v = std::max(g_max_v, s.max_v);
    constants.push_back(worst / (dx * dx));
  }
  c.detail << " Q-P constants " << constants[0] << " " << constants[1] << " " << constants[2];
  for (std::size_t i = 1; i < constants.size(); ++i)
    c.require(std::abs(constants[i] / constants[i - 1] - 1) <= 0.25, "Q-P difference scales as dx^2");

  const auto out = fs::temp_directory_path() / "wavefreeze_acceptance_det";
  fs::remove_all(out);
  for (const char* run : {"a", "b"}) {
    config::Config cfg;
    cfg.apply_preset("ex-kt");
    cfg.set("time.T", "30");
    harness::run(harness::Command::Evolve, cfg, out / run);
    cfg.set("stationary.r", "20");
    harness::run(harness::Command::Stationary, cfg, out / run / "st");
  }
  bool same = true;
  for (const char* f : {"evolve.csv", "profile_final.csv", "st/profile.csv"}) {
    const auto a = slurp(out / "a" / f);
    same = same && !a.empty() && a == slurp(out / "b" / f);
  }
  fs::remove_all(out);
  c.require(same, "byte-identical CSVs");

  c.detail << " bounds [" << g_min_v << ", " << g_max_v << "]";
  c.require(g_min_v >= 0.0 && g_max_v <= 1 + 1e-9, "0 <= v <= 1 + 1e-9");
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Criterion&)>> table[] = {
      {"exact speed recovery", exact_speed_recovery},
      {"stationary convergence in r", stationary_convergence},
      {"cross-method triangulation", triangulation},
      {"exponential decay of the speed error", decay},
      {"profile accuracy", profile_accuracy},
      {"spectral stability", spectral_stability},
      {"property suites", property_suites},
  };
  int failed = 0;
  for (const auto& [name, body] : table) {
    Criterion c;
    c.name = name;
    try {
      body(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s  %s:%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.str().c_str());
    std::fflush(stdout);
    if (!c.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(table)) - failed, std::size(table));
  return failed == 0 ? 0 : 1;
}
