#include "wavefreeze/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "wavefreeze/errors.hpp"

namespace wavefreeze::config {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

struct Preset {
  const char* name;
  std::vector<std::pair<const char*, const char*>> values;
};

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"ex-linini", {{"initial.kind", "linear_ramp"}}},
      {"ex-kt", {{"initial.kind", "sine_mix"}}},
      {"ex-nbc", {{"initial.kind", "step"}, {"initial.lo", "0.2"}, {"initial.hi", "0.8"}}},
  };
  return table;
}

}  // namespace

const std::vector<KeyInfo>& keys() {
  static const std::vector<KeyInfo> table = {
      {"reaction.kind", "nagumo", "nagumo | tabulated"},
      {"reaction.alpha", "0.25", "interior zero of the Nagumo cubic"},
      {"reaction.table", "", "CSV with columns u, f, f_prime on a uniform grid of [0,1] (tabulated kind)"},
      {"grid.J", "40", "half width: the interval is [-J, J]"},
      {"grid.dx", "0.1", "target spacing; the cell count is round(2J/dx)"},
      {"grid.M", "0", "cell count; when positive it overrides grid.dx"},
      {"time.T", "150", "final time"},
      {"time.atol", "1e-8", "absolute tolerance of the time-step controller"},
      {"time.rtol", "1e-8", "relative tolerance of the time-step controller"},
      {"time.dt_max", "1", "largest time step"},
      {"time.record_every", "1", "history row every n accepted steps"},
      {"functional", "quotient", "quotient | potential | integral_mass"},
      {"initial.kind", "linear_ramp", "linear_ramp | sine_mix | step | stationary"},
      {"initial.lo", "0.2", "step value left of the midpoint"},
      {"initial.hi", "0.8", "step value right of the midpoint"},
      {"evolve.reference", "none", "none | discrete: sup_err column against the same-grid equilibrium"},
      {"stationary.r", "40", "interval length"},
      {"stationary.tol", "1e-9", "slope-condition tolerance"},
      {"stationary.dx", "0.1", "spacing of the profile.csv samples"},
      {"speed.tol", "1e-8", "bisection width for the heteroclinic speed"},
      {"spectrum.r", "40", "interval length, or a comma-separated list"},
      {"spectrum.dx", "0.05", "grid spacing of the operators"},
      {"spectrum.basis", "discrete", "discrete | profile: linearize around the grid equilibrium or the sampled profile"},
      {"spectrum.rho0", "1", "sector vertex"},
      {"spectrum.phi", "2.356194490192345", "sector half-opening"},
      {"validate.tol_pairwise", "5e-3", "tolerance on the three pairwise gaps"},
      {"validate.tol_exact", "1e-6", "tolerance on |c_heteroclinic - c_exact|"},
      {"validate.spectrum", "true", "also write spectrum.csv for the validation interval"},
      {"sweep.axis", "r", "r | dx | alpha"},
      {"sweep.values", "10,20,40,80", "comma-separated values, at least two"},
      {"sweep.command", "stationary", "evolve | stationary | speed | spectrum | validate"},
  };
  return table;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : presets()) out.emplace_back(p.name);
  return out;
}

Config::Config() {
  for (const auto& k : keys()) {
    values_[k.key] = k.default_value;
    explicit_[k.key] = false;
  }
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorKind::Config, "unknown configuration key '" + key + "'");
  it->second = trim(value);
  explicit_[key] = true;
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorKind::Config, "unknown configuration key '" + key + "'");
  return it->second;
}

bool Config::is_default(const std::string& key) const {
  get(key);
  return !explicit_.at(key);
}

void Config::merge_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(number);
    if (eq == std::string::npos) fail(ErrorKind::Config, where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(ErrorKind::Config, where + ": missing key");
    if (!seen.insert(key).second) fail(ErrorKind::Config, where + ": key '" + key + "' repeated");
    try {
      set(key, line.substr(eq + 1));
    } catch (const Error& e) {
      fail(ErrorKind::Config, where + ": " + e.what());
    }
  }
}

void Config::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Config, "cannot read configuration file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  merge_text(buf.str(), path.string());
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) fail(ErrorKind::Config, "override '" + assignment + "' is not key=value");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void Config::apply_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (name != p.name) continue;
    for (const auto& [k, v] : p.values) set(k, v);
    return;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  fail(ErrorKind::Config, "unknown preset '" + name + "' (known: " + known + ")");
}

double Config::number(const std::string& key) const {
  double x = 0.0;
  if (!parse_double(get(key), x)) fail(ErrorKind::Config, key + ": '" + get(key) + "' is not a number");
  return x;
}

long Config::integer(const std::string& key) const {
  const std::string t = trim(get(key));
  long x = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    fail(ErrorKind::Config, key + ": '" + t + "' is not an integer");
  return x;
}

bool Config::boolean(const std::string& key) const {
  std::string t = trim(get(key));
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  fail(ErrorKind::Config, key + ": '" + t + "' is not a boolean");
}

std::vector<double> Config::number_list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    double x = 0.0;
    if (!parse_double(item, x)) fail(ErrorKind::Config, key + ": '" + trim(item) + "' is not a number");
    out.push_back(x);
  }
  if (out.empty()) fail(ErrorKind::Config, key + ": empty list");
  return out;
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace wavefreeze::config
