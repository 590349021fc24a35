#include "wavefreeze/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "wavefreeze/io.hpp"
#include "wavefreeze/phaseplane.hpp"
#include "wavefreeze/spectrum.hpp"

namespace wavefreeze::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using reaction::BistableReaction;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json grid_json(const GridSpec& grid) { return {{"a", grid.a}, {"b", grid.b}, {"cells", grid.cells}, {"dx", grid.dx()}}; }

json config_json(const config::Config& config) {
  json j = json::object();
  for (const auto& [k, v] : config.values()) j[k] = v;
  return j;
}

struct Result {
  json summary;
  std::string message;
  int exit_code = 0;
};

void write_json(const fs::path& path, const json& j) { io::write_atomic(path, j.dump(2) + "\n"); }

// Continuous stationary profile on the evolution interval [-J, J].
phaseplane::StationaryProfile interval_profile(const BistableReaction& reaction, const GridSpec& grid) {
  return phaseplane::stationary_nonlocal(reaction, grid.b - grid.a).placed_at(grid.a);
}

evolution::StepControl step_control(const config::Config& config) {
  evolution::StepControl control;
  control.atol = config.number("time.atol");
  control.rtol = config.number("time.rtol");
  control.dt_max = config.number("time.dt_max");
  const long every = config.integer("time.record_every");
  if (every < 1) fail(ErrorKind::Config, "time.record_every must be at least 1");
  control.record_every = static_cast<int>(every);
  if (!(control.atol > 0.0 && control.rtol >= 0.0 && control.dt_max > 0.0))
    fail(ErrorKind::Config, "time tolerances and dt_max must be positive");
  return control;
}

double final_time(const config::Config& config) {
  const double T = config.number("time.T");
  if (!(T >= 0.0) || !std::isfinite(T)) fail(ErrorKind::Config, "time.T must be finite and >= 0");
  return T;
}

io::CsvTable history_table(const evolution::EvolutionState& state) {
  io::CsvTable t;
  t.columns = {"t", "lambda", "gamma", "l1_grad", "l2_grad_sq", "sup_err_vs_reference"};
  for (const auto& row : state.history) t.add_row({row.t, row.lambda, row.gamma, row.l1_grad, row.l2_grad_sq, row.sup_err});
  return t;
}

io::CsvTable state_table(const evolution::EvolutionState& state) {
  io::CsvTable t;
  t.columns = {"x", "v"};
  for (int j = 0; j <= state.grid.cells; ++j) t.add_row({state.grid.x(j), state.v[static_cast<std::size_t>(j)]});
  return t;
}

io::CsvTable profile_table(const phaseplane::StationaryProfile& profile, double dx) {
  const GridSpec grid = spectrum::grid_for(profile, dx);
  const auto value = phaseplane::profile_on_grid(profile, grid);
  const auto slope = phaseplane::profile_slope_on_grid(profile, grid);
  io::CsvTable t;
  t.columns = {"x", "value", "slope"};
  for (int j = 0; j <= grid.cells; ++j)
    t.add_row({grid.x(j), value[static_cast<std::size_t>(j)], slope[static_cast<std::size_t>(j)]});
  return t;
}

io::CsvTable spectrum_table(const spectrum::SpectrumReport& report) {
  io::CsvTable t;
  t.columns = {"re", "im"};
  for (const auto& z : report.eigenvalues) t.add_row({z.real(), z.imag()});
  return t;
}

struct EvolveRun {
  evolution::EvolutionState state;
  double decay_slope;
};

EvolveRun run_evolution(const config::Config& config, const BistableReaction& reaction, const GridSpec& grid) {
  const auto functional = evolution::parse_functional(config.get("functional"));
  const auto initial = make_initial(config, reaction, grid);
  const double T = final_time(config);
  const auto control = step_control(config);
  std::vector<double> reference;
  const std::string ref = config.get("evolve.reference");
  if (ref == "discrete") {
    const auto profile = interval_profile(reaction, grid);
    reference = evolution::discrete_stationary(reaction, grid, functional, phaseplane::profile_on_grid(profile, grid)).v;
  } else if (ref != "none") {
    fail(ErrorKind::Config, "evolve.reference must be none or discrete");
  }
  auto state = evolution::evolve(reaction, grid, initial, functional, T, control, reference.empty() ? nullptr : &reference);
  const double slope = evolution::fit_decay_slope(state.history, state.lambda, 0.5 * T, 0.9 * T);
  return {std::move(state), slope};
}

json evolve_json(const EvolveRun& run, const std::optional<double>& c_exact) {
  const auto& s = run.state;
  return {{"lambda_final", s.lambda},
          {"gamma_final", s.gamma},
          {"t_final", s.t},
          {"history_rows", s.history.size()},
          {"accepted_steps", s.accepted_steps},
          {"rejected_steps", s.rejected_steps},
          {"bound_rejections", s.bound_rejections},
          {"min_v", s.min_v},
          {"max_v", s.max_v},
          {"decay_slope", number_or_null(run.decay_slope)},
          {"c_exact", optional_number(c_exact)},
          {"lambda_minus_c_exact", c_exact ? json(s.lambda - *c_exact) : json(nullptr)},
          {"grid", grid_json(s.grid)}};
}

Result cmd_evolve(const config::Config& config, const fs::path& out) {
  const auto reaction = make_reaction(config);
  const auto grid = make_grid(config);
  const auto run = run_evolution(config, reaction, grid);
  io::write_csv(out / "evolve.csv", history_table(run.state));
  io::write_csv(out / "profile_final.csv", state_table(run.state));
  return {evolve_json(run, exact_speed(reaction)), "lambda(T) = " + fmt(run.state.lambda)};
}

json stationary_json(const phaseplane::StationaryProfile& p, const BistableReaction& reaction) {
  const auto c_exact = exact_speed(reaction);
  double sup_err = kNaN, grad_err = kNaN;
  if (c_exact && reaction.alpha() == 0.25) {
    const auto cmp = phaseplane::compare_to_reference(p, phaseplane::nagumo_exact_profile());
    sup_err = cmp.sup_err;
    grad_err = cmp.grad_l2_err;
  }
  return {{"r", p.length()},
          {"lambda_r", p.lambda_r},
          {"theta", p.theta},
          {"upsilon", p.upsilon},
          {"slope_residual", p.slope_residual},
          {"identity_residual", p.identity_residual},
          {"grad_l2_sq", p.grad_l2_sq},
          {"a", p.a},
          {"b", p.b},
          {"normalization_shift", p.normalization_shift},
          {"resolution_limited", p.resolution_limited},
          {"c_exact", optional_number(c_exact)},
          {"lambda_minus_c_exact", c_exact ? json(p.lambda_r - *c_exact) : json(nullptr)},
          {"sup_err_vs_exact", number_or_null(sup_err)},
          {"grad_l2_err_vs_exact", number_or_null(grad_err)}};
}

double positive(const config::Config& config, const std::string& key) {
  const double x = config.number(key);
  if (!(x > 0.0) || !std::isfinite(x)) fail(ErrorKind::Config, key + " must be positive");
  return x;
}

Result cmd_stationary(const config::Config& config, const fs::path& out) {
  const auto reaction = make_reaction(config);
  const double r = positive(config, "stationary.r");
  const double tol = positive(config, "stationary.tol");
  const double dx = positive(config, "stationary.dx");
  const auto profile = phaseplane::stationary_nonlocal(reaction, r, tol);
  io::write_csv(out / "profile.csv", profile_table(profile, dx));
  return {stationary_json(profile, reaction), "lambda_r = " + fmt(profile.lambda_r)};
}

Result cmd_speed(const config::Config& config, const fs::path&) {
  const auto reaction = make_reaction(config);
  const double tol = positive(config, "speed.tol");
  const double c = phaseplane::heteroclinic_speed(reaction, tol);
  const auto c_exact = exact_speed(reaction);
  json j = {{"c_star", c},
            {"tol", tol},
            {"c_exact", optional_number(c_exact)},
            {"error", c_exact ? json(c - *c_exact) : json(nullptr)}};
  return {j, "c* = " + io::format_number(c)};
}

struct SpectrumEntry {
  json summary;
  spectrum::SpectrumReport nonlocal;
  spectrum::SpectrumReport local;
  bool passed;
};

json complex_list(const std::vector<spectrum::Complex>& zs, std::size_t limit = 16) {
  json arr = json::array();
  for (std::size_t i = 0; i < zs.size() && i < limit; ++i) arr.push_back({zs[i].real(), zs[i].imag()});
  return arr;
}

SpectrumEntry spectrum_entry(const BistableReaction& reaction, const phaseplane::StationaryProfile& profile,
                             double dx, const std::string& basis, spectrum::Sector sector) {
  const GridSpec grid = spectrum::grid_for(profile, dx);
  spectrum::Linearization lin;
  if (basis == "discrete")
    lin = spectrum::discrete_equilibrium(profile, grid, reaction);
  else if (basis == "profile")
    lin = spectrum::sample_profile(profile, grid);
  else
    fail(ErrorKind::Config, "spectrum.basis must be discrete or profile");
  const auto nl_matrix = spectrum::assemble_nonlocal(lin, reaction);
  auto nonlocal = spectrum::eigenvalues(nl_matrix);
  auto local = spectrum::eigenvalues(spectrum::assemble_local(lin, reaction));
  const auto checks = spectrum::stability_checks(nonlocal, sector);

  const auto slopes = spectrum::interior(lin.slopes);
  double cosine = kNaN;
  if (nonlocal.rightmost_is_real)
    cosine = spectrum::cosine_similarity(spectrum::real_eigenvector(nl_matrix, nonlocal.rightmost.real()), slopes);
  const auto applied = nl_matrix.apply(slopes);
  double kernel_residual = 0.0;
  for (double v : applied) kernel_residual = std::max(kernel_residual, std::abs(v));

  int complex_right = 0;
  for (const auto& z : nonlocal.eigenvalues)
    if (!nonlocal.is_real(z) && z.real() > 0.0) ++complex_right;

  json check_arr = json::array();
  for (const auto& c : checks.checks)
    check_arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"offenders", complex_list(c.offenders)}});

  json j = {{"r", profile.length()},
            {"n", nl_matrix.n},
            {"dx", grid.dx()},
            {"lambda", lin.lambda},
            {"s_r", nonlocal.rightmost.real()},
            {"s_r_imag", nonlocal.rightmost.imag()},
            {"next_real", nonlocal.eigenvalues.size() > 1 ? json(nonlocal.eigenvalues[1].real()) : json(nullptr)},
            {"s_r_local", local.rightmost.real()},
            {"local_max_imag_over_scale", local.max_abs_imag() / local.scale},
            {"real_at_or_above_minus_1e-10", nonlocal.real_count_at_or_above(-1e-10)},
            {"complex_with_positive_real_part", complex_right},
            {"kernel_cosine", number_or_null(cosine)},
            {"kernel_residual", kernel_residual},
            {"sector", {{"rho0", checks.sector.rho0}, {"phi", checks.sector.phi}, {"widened", checks.widened}}},
            {"checks", check_arr},
            {"pass", checks.passed}};
  return {std::move(j), std::move(nonlocal), std::move(local), checks.passed};
}

spectrum::Sector sector_of(const config::Config& config) {
  return {config.number("spectrum.rho0"), config.number("spectrum.phi")};
}

Result cmd_spectrum(const config::Config& config, const fs::path& out) {
  const auto reaction = make_reaction(config);
  const auto r_list = config.number_list("spectrum.r");
  const double dx = positive(config, "spectrum.dx");
  const std::string basis = config.get("spectrum.basis");
  json entries = json::array();
  io::CsvTable gap;
  gap.columns = {"r", "s_r", "s_r_local"};
  bool pass = true;
  std::optional<SpectrumEntry> last;
  for (double r : r_list) {
    if (!(r > 0.0)) fail(ErrorKind::Config, "spectrum.r entries must be positive");
    const auto profile = phaseplane::stationary_nonlocal(reaction, r);
    auto entry = spectrum_entry(reaction, profile, dx, basis, sector_of(config));
    gap.add_row({r, entry.nonlocal.rightmost.real(), entry.local.rightmost.real()});
    pass = pass && entry.passed;
    entries.push_back(entry.summary);
    last = std::move(entry);
  }
  io::write_csv(out / "spectrum.csv", spectrum_table(last->nonlocal));
  io::write_csv(out / "spectrum_local.csv", spectrum_table(last->local));
  json j = {{"basis", basis}, {"entries", entries}, {"pass", pass}};
  if (r_list.size() > 1) {
    io::write_csv(out / "gap_table.csv", gap);
    bool decreasing = true;
    for (std::size_t i = 1; i < gap.rows.size(); ++i)
      decreasing = decreasing && std::abs(gap.rows[i][1]) < std::abs(gap.rows[i - 1][1]);
    j["abs_s_r_decreasing"] = decreasing;
  }
  return {j, std::string("s(r) = ") + io::format_number(last->nonlocal.rightmost.real()) + (pass ? ", checks pass" : ", checks FAIL")};
}

Result cmd_validate(const config::Config& config, const fs::path& out) {
  const auto reaction = make_reaction(config);
  const auto grid = make_grid(config);
  const auto c_exact = exact_speed(reaction);
  const double tol_pair = positive(config, "validate.tol_pairwise");
  const double tol_exact = positive(config, "validate.tol_exact");
  const auto functional = evolution::parse_functional(config.get("functional"));

  const double c_het = phaseplane::heteroclinic_speed(reaction, positive(config, "speed.tol"));
  const auto profile = interval_profile(reaction, grid);
  const auto same_grid =
      evolution::discrete_stationary(reaction, grid, functional, phaseplane::profile_on_grid(profile, grid));
  const auto run = run_evolution(config, reaction, grid);
  const double lam_evo = run.state.lambda;

  io::write_csv(out / "evolve.csv", history_table(run.state));
  io::write_csv(out / "profile_final.csv", state_table(run.state));
  io::write_csv(out / "profile.csv", profile_table(profile, grid.dx()));
  json spectrum_summary = nullptr;
  if (config.boolean("validate.spectrum")) {
    auto entry = spectrum_entry(reaction, profile, grid.dx(), config.get("spectrum.basis"), sector_of(config));
    io::write_csv(out / "spectrum.csv", spectrum_table(entry.nonlocal));
    spectrum_summary = entry.summary;
  }

  const double g_hs = std::abs(c_het - profile.lambda_r);
  const double g_he = std::abs(c_het - lam_evo);
  const double g_se = std::abs(profile.lambda_r - lam_evo);
  const double g_exact = c_exact ? std::abs(c_het - *c_exact) : kNaN;
  const bool pass = g_hs <= tol_pair && g_he <= tol_pair && g_se <= tol_pair && (!c_exact || g_exact <= tol_exact);

  json v = {{"c_exact", optional_number(c_exact)},
            {"c_heteroclinic", c_het},
            {"lambda_stationary", profile.lambda_r},
            {"lambda_stationary_same_grid", same_grid.lambda},
            {"lambda_evolution_final", lam_evo},
            {"pairwise_gaps",
             {{"heteroclinic_stationary", g_hs}, {"heteroclinic_evolution", g_he}, {"stationary_evolution", g_se}}},
            {"gap_exact_heteroclinic", number_or_null(g_exact)},
            {"gap_evolution_same_grid", std::abs(lam_evo - same_grid.lambda)},
            {"tolerances", {{"pairwise", tol_pair}, {"exact", tol_exact}}},
            {"pass", pass}};
  write_json(out / "validation.json", v);
  json j = {{"validation", v}, {"evolution", evolve_json(run, c_exact)}, {"stationary", stationary_json(profile, reaction)},
            {"spectrum", spectrum_summary}};
  return {j, std::string("validation ") + (pass ? "pass" : "FAIL")};
}

struct SubRun {
  int exit_code;
  json summary;
  fs::path dir;
};

json get_or_null(const json& j, std::initializer_list<const char*> path) {
  const json* cur = &j;
  for (const char* key : path) {
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &(*cur)[key];
  }
  return *cur;
}

double as_number(const json& j) { return j.is_number() ? j.get<double>() : kNaN; }

// Largest |difference| over the nodes shared by two final states on nested grids.
double common_node_difference(const io::CsvTable& coarse, const io::CsvTable& fine) {
  const auto vc = coarse.column("v");
  const auto vf = fine.column("v");
  if (vc.size() < 2 || vf.size() < 2) return kNaN;
  const std::size_t mc = vc.size() - 1, mf = vf.size() - 1;
  if (mf % mc != 0) return kNaN;
  const std::size_t k = mf / mc;
  double d = 0.0;
  for (std::size_t j = 0; j <= mc; ++j) d = std::max(d, std::abs(vc[j] - vf[j * k]));
  return d;
}

Result cmd_sweep(const config::Config& config, const fs::path& out) {
  const std::string axis = config.get("sweep.axis");
  if (axis != "r" && axis != "dx" && axis != "alpha") fail(ErrorKind::Config, "sweep.axis must be r, dx or alpha");
  const auto values = config.number_list("sweep.values");
  if (values.size() < 2) fail(ErrorKind::Config, "sweep.values needs at least two values");
  const Command sub = parse_command(config.get("sweep.command"));
  if (sub == Command::Sweep) fail(ErrorKind::Config, "sweep.command cannot be sweep");

  std::vector<SubRun> runs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    config::Config c = config;
    const std::string v = io::format_number(values[i]);
    if (axis == "r") {
      c.set("stationary.r", v);
      c.set("spectrum.r", v);
      c.set("grid.J", io::format_number(0.5 * values[i]));
    } else if (axis == "dx") {
      c.set("grid.dx", v);
      c.set("grid.M", "0");
      c.set("spectrum.dx", v);
    } else {
      c.set("reaction.alpha", v);
    }
    char name[32];
    std::snprintf(name, sizeof name, "run_%02zu", i);
    const fs::path dir = out / name;
    const auto outcome = run(sub, c, dir);
    runs.push_back({outcome.exit_code, json::parse(outcome.summary_json), dir});
  }

  io::CsvTable table;
  std::vector<std::string> metrics;
  switch (sub) {
    case Command::Stationary: metrics = {"lambda_r", "abs_err_c_exact", "sup_err_vs_exact", "a", "b"}; break;
    case Command::Evolve: metrics = {"lambda_final", "abs_err_c_exact", "diff_to_next"}; break;
    case Command::Speed: metrics = {"c_star", "abs_err_c_exact"}; break;
    case Command::Spectrum: metrics = {"s_r", "s_r_local", "pass"}; break;
    case Command::Validate: metrics = {"lambda_evolution_final", "lambda_stationary", "pass"}; break;
    case Command::Sweep: break;
  }
  table.columns = {"value", "exit_code"};
  table.columns.insert(table.columns.end(), metrics.begin(), metrics.end());

  int exit_code = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& s = runs[i].summary;
    std::vector<double> row = {values[i], static_cast<double>(runs[i].exit_code)};
    if (runs[i].exit_code != 0 && exit_code == 0) exit_code = runs[i].exit_code;
    const bool ok = runs[i].exit_code == 0;
    auto metric = [&](std::initializer_list<const char*> path) { return ok ? as_number(get_or_null(s, path)) : kNaN; };
    auto abs_metric = [&](std::initializer_list<const char*> path) { return std::abs(metric(path)); };
    auto flag = [&](std::initializer_list<const char*> path) {
      const json b = get_or_null(s, path);
      return ok && b.is_boolean() ? (b.get<bool>() ? 1.0 : 0.0) : kNaN;
    };
    switch (sub) {
      case Command::Stationary:
        row.insert(row.end(), {metric({"lambda_r"}), abs_metric({"lambda_minus_c_exact"}), metric({"sup_err_vs_exact"}),
                               metric({"a"}), metric({"b"})});
        break;
      case Command::Evolve: {
        double diff = kNaN;
        if (ok && i + 1 < runs.size() && runs[i + 1].exit_code == 0)
          diff = common_node_difference(io::read_csv(runs[i].dir / "profile_final.csv"),
                                        io::read_csv(runs[i + 1].dir / "profile_final.csv"));
        row.insert(row.end(), {metric({"lambda_final"}), abs_metric({"lambda_minus_c_exact"}), diff});
        break;
      }
      case Command::Speed: row.insert(row.end(), {metric({"c_star"}), abs_metric({"error"})}); break;
      case Command::Spectrum:
        row.insert(row.end(), {kNaN, kNaN, kNaN});
        if (ok) {
          const json& e = s["entries"][0];
          row[2] = as_number(e["s_r"]);
          row[3] = as_number(e["s_r_local"]);
          row[4] = e["pass"].get<bool>() ? 1.0 : 0.0;
        }
        break;
      case Command::Validate:
        row.insert(row.end(), {metric({"validation", "lambda_evolution_final"}), metric({"validation", "lambda_stationary"}),
                               flag({"validation", "pass"})});
        break;
      case Command::Sweep: break;
    }
    table.add_row(std::move(row));
  }
  io::write_csv(out / "sweep.csv", table);

  json j = {{"axis", axis}, {"command", to_string(sub)}, {"values", values}};
  json codes = json::array();
  for (const auto& r : runs) codes.push_back(r.exit_code);
  j["exit_codes"] = codes;
  const std::size_t trend_col = sub == Command::Stationary ? 3 : sub == Command::Evolve ? 4 : sub == Command::Spectrum ? 2 : 0;
  if (trend_col != 0) {
    json col = json::array();
    bool decreasing = true;
    double prev = kNaN;
    for (const auto& row : table.rows) {
      const double x = std::abs(row[trend_col]);
      if (!std::isfinite(x)) continue;
      col.push_back(x);
      if (std::isfinite(prev)) decreasing = decreasing && x < prev;
      prev = x;
    }
    j["trend_column"] = table.columns[trend_col];
    j["trend_values"] = col;
    j["trend_decreasing"] = decreasing;
    if (sub == Command::Evolve) {
      json ratios = json::array();
      for (std::size_t i = 1; i < col.size(); ++i) ratios.push_back(col[i - 1].get<double>() / col[i].get<double>());
      j["refinement_ratios"] = ratios;
    }
  }
  if (exit_code != 0) return {j, "sweep finished with failing runs, partial results in sweep.csv", exit_code};
  return {j, "sweep of " + std::to_string(values.size()) + " runs written to sweep.csv"};
}

Result run_body(Command command, const config::Config& config, const fs::path& out) {
  switch (command) {
    case Command::Evolve: return cmd_evolve(config, out);
    case Command::Stationary: return cmd_stationary(config, out);
    case Command::Speed: return cmd_speed(config, out);
    case Command::Spectrum: return cmd_spectrum(config, out);
    case Command::Validate: return cmd_validate(config, out);
    case Command::Sweep: return cmd_sweep(config, out);
  }
  fail(ErrorKind::Precondition, "unknown command");
}

}  // namespace

const char* to_string(Command command) {
  switch (command) {
    case Command::Evolve: return "evolve";
    case Command::Stationary: return "stationary";
    case Command::Speed: return "speed";
    case Command::Spectrum: return "spectrum";
    case Command::Validate: return "validate";
    case Command::Sweep: return "sweep";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::Evolve, Command::Stationary, Command::Speed, Command::Spectrum, Command::Validate,
                    Command::Sweep})
    if (name == to_string(c)) return c;
  fail(ErrorKind::Config, "unknown command '" + name + "'");
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Precondition:
    case ErrorKind::Io: return 2;
    case ErrorKind::Numeric:
    case ErrorKind::Domain:
    case ErrorKind::Degenerate: return 3;
    case ErrorKind::NoSolution: return 4;
  }
  return 3;
}

std::optional<double> exact_speed(const BistableReaction& reaction) {
  if (reaction.kind() != reaction::Kind::NagumoCubic) return std::nullopt;
  return std::sqrt(2.0) * (reaction.alpha() - 0.5);
}

BistableReaction make_reaction(const config::Config& config) {
  const std::string kind = config.get("reaction.kind");
  std::optional<BistableReaction> r;
  if (kind == "nagumo") {
    r = BistableReaction::nagumo(config.number("reaction.alpha"));
  } else if (kind == "tabulated") {
    const std::string path = config.get("reaction.table");
    if (path.empty()) fail(ErrorKind::Config, "reaction.table is required for the tabulated kind");
    io::CsvTable t;
    try {
      t = io::read_csv(path);
    } catch (const Error& e) {
      fail(ErrorKind::Config, std::string("reaction.table: ") + e.what());
    }
    const auto u = t.column("u");
    if (u.size() < 2 || u.front() != 0.0 || std::abs(u.back() - 1.0) > 1e-12)
      fail(ErrorKind::Config, "reaction.table must sample [0,1] from u = 0 to u = 1");
    const double h = 1.0 / static_cast<double>(u.size() - 1);
    for (std::size_t i = 0; i < u.size(); ++i)
      if (std::abs(u[i] - static_cast<double>(i) * h) > 1e-9) fail(ErrorKind::Config, "reaction.table grid is not uniform");
    r = BistableReaction::tabulated(t.column("f"), t.column("f_prime"));
  } else {
    fail(ErrorKind::Config, "reaction.kind must be nagumo or tabulated");
  }
  const auto report = reaction::validate_bistable(*r);
  if (!report.all_passed()) fail(ErrorKind::Config, "reaction is not bistable: " + report.summary());
  return *r;
}

GridSpec make_grid(const config::Config& config) {
  const double J = config.number("grid.J");
  if (!(J > 0.0) || !std::isfinite(J)) fail(ErrorKind::Config, "grid.J must be positive");
  const long M = config.integer("grid.M");
  try {
    if (M > 0) return GridSpec::from_cells(-J, J, static_cast<int>(M));
    if (M < 0) fail(ErrorKind::Config, "grid.M must be positive (or 0 to use grid.dx)");
    const double dx = config.number("grid.dx");
    if (!(dx > 0.0)) fail(ErrorKind::Config, "grid.dx must be positive");
    return GridSpec::symmetric(J, dx);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Precondition) fail(ErrorKind::Config, e.what());
    throw;
  }
}

evolution::InitialData make_initial(const config::Config& config, const BistableReaction& reaction,
                                    const GridSpec& grid) {
  const std::string kind = config.get("initial.kind");
  if (kind == "linear_ramp") return evolution::InitialData::linear_ramp();
  if (kind == "sine_mix") return evolution::InitialData::sine_mix();
  if (kind == "step") {
    const double lo = config.number("initial.lo"), hi = config.number("initial.hi");
    if (!(lo >= 0.0 && lo <= 1.0 && hi >= 0.0 && hi <= 1.0))
      fail(ErrorKind::Config, "initial.lo and initial.hi must lie in [0,1]");
    return evolution::InitialData::step(lo, hi);
  }
  if (kind == "stationary") return evolution::InitialData::from_profile(interval_profile(reaction, grid));
  fail(ErrorKind::Config, "initial.kind must be linear_ramp, sine_mix, step or stationary");
}

RunOutcome run(Command command, const config::Config& config, const fs::path& out_dir) {
  Stopwatch clock;
  json summary = {{"command", to_string(command)}};
  RunOutcome outcome;
  auto finish_error = [&](int code, ErrorKind kind, const std::string& what, json extra) {
    outcome.exit_code = code;
    outcome.message = std::string(to_string(kind)) + ": " + what;
    summary["status"] = "error";
    summary["exit_code"] = code;
    summary["error_kind"] = to_string(kind);
    summary["message"] = what;
    if (!extra.is_null()) summary["details"] = std::move(extra);
  };
  try {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
      fail(ErrorKind::Io, "cannot create output directory '" + out_dir.string() + "'");
    auto result = run_body(command, config, out_dir);
    summary["status"] = result.exit_code == 0 ? "ok" : "partial";
    summary["exit_code"] = result.exit_code;
    summary.update(result.summary);
    outcome.exit_code = result.exit_code;
    outcome.message = result.message;
  } catch (const phaseplane::StationaryNoSolution& e) {
    json scan = json::array();
    for (const auto& s : e.scan())
      scan.push_back({{"c", s.c}, {"theta", number_or_null(s.theta)}, {"mismatch", number_or_null(s.mismatch)}, {"status", s.status}});
    finish_error(exit_code_for(e.kind()), e.kind(), e.what(), {{"scan", scan}});
  } catch (const spectrum::QrNonConvergence& e) {
    finish_error(exit_code_for(e.kind()), e.kind(), e.what(), {{"partial", complex_list(e.partial(), e.partial().size())}});
  } catch (const Error& e) {
    finish_error(exit_code_for(e.kind()), e.kind(), e.what(), nullptr);
  } catch (const std::exception& e) {
    finish_error(3, ErrorKind::Numeric, e.what(), nullptr);
  }
  summary["config"] = config_json(config);
  summary["wall_time_s"] = clock.seconds();
  outcome.summary_json = summary.dump(2) + "\n";
  try {
    io::write_atomic(out_dir / "summary.json", outcome.summary_json);
  } catch (const Error& e) {
    if (outcome.exit_code == 0) {
      outcome.exit_code = exit_code_for(e.kind());
      outcome.message = e.what();
    }
  }
  return outcome;
}

}  // namespace wavefreeze::harness
