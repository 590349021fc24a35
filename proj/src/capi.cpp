#include "wavefreeze/wavefreeze.h"

#include <cstring>
#include <new>
#include <string>

#include "wavefreeze/config.hpp"
#include "wavefreeze/evolution.hpp"
#include "wavefreeze/harness.hpp"
#include "wavefreeze/phaseplane.hpp"
#include "wavefreeze/spectrum.hpp"

using namespace wavefreeze;

struct wf_reaction {
  reaction::BistableReaction r;
};
struct wf_profile {
  phaseplane::StationaryProfile p;
};
struct wf_evolution {
  evolution::EvolutionState s;
};
struct wf_spectrum {
  spectrum::SpectrumReport report;
};
struct wf_config {
  config::Config c;
};
struct wf_run_result {
  harness::RunOutcome outcome;
};

namespace {

thread_local std::string last_error;

wf_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Precondition: return WF_E_PRECONDITION;
    case ErrorKind::Domain: return WF_E_DOMAIN;
    case ErrorKind::Numeric: return WF_E_NUMERIC;
    case ErrorKind::NoSolution: return WF_E_NO_SOLUTION;
    case ErrorKind::Degenerate: return WF_E_DEGENERATE;
    case ErrorKind::Config: return WF_E_CONFIG;
    case ErrorKind::Io: return WF_E_IO;
  }
  return WF_E_INTERNAL;
}

template <class F>
wf_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return WF_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return WF_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return WF_E_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return WF_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorKind::Precondition, std::string(what) + " must not be null");
}

}  // namespace

extern "C" {

const char* wf_version(void) { return "1.0.0"; }

const char* wf_status_string(wf_status status) {
  switch (status) {
    case WF_OK: return "ok";
    case WF_E_PRECONDITION: return "precondition";
    case WF_E_DOMAIN: return "domain";
    case WF_E_NUMERIC: return "numeric";
    case WF_E_NO_SOLUTION: return "no_solution";
    case WF_E_DEGENERATE: return "degenerate";
    case WF_E_CONFIG: return "config";
    case WF_E_IO: return "io";
    case WF_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* wf_last_error(void) { return last_error.c_str(); }

int wf_exit_code(wf_status status) {
  switch (status) {
    case WF_OK: return 0;
    case WF_E_PRECONDITION: return harness::exit_code_for(ErrorKind::Precondition);
    case WF_E_DOMAIN: return harness::exit_code_for(ErrorKind::Domain);
    case WF_E_NUMERIC: return harness::exit_code_for(ErrorKind::Numeric);
    case WF_E_NO_SOLUTION: return harness::exit_code_for(ErrorKind::NoSolution);
    case WF_E_DEGENERATE: return harness::exit_code_for(ErrorKind::Degenerate);
    case WF_E_CONFIG: return harness::exit_code_for(ErrorKind::Config);
    case WF_E_IO: return harness::exit_code_for(ErrorKind::Io);
    case WF_E_INTERNAL: return 3;
  }
  return 3;
}

wf_status wf_reaction_nagumo(double alpha, wf_reaction** out) {
  return guarded([&] {
    need(out, "out");
    *out = new wf_reaction{reaction::BistableReaction::nagumo(alpha)};
  });
}

wf_status wf_reaction_tabulated(const double* f, const double* f_prime, size_t n, wf_reaction** out) {
  return guarded([&] {
    need(f, "f");
    need(f_prime, "f_prime");
    need(out, "out");
    *out = new wf_reaction{reaction::BistableReaction::tabulated({f, f + n}, {f_prime, f_prime + n})};
  });
}

void wf_reaction_free(wf_reaction* reaction) { delete reaction; }

wf_status wf_reaction_eval(const wf_reaction* reaction, double u, double* f, double* f_prime) {
  return guarded([&] {
    need(reaction, "reaction");
    const double fv = reaction->r.f(u);
    const double dv = reaction->r.f_prime(u);
    if (f) *f = fv;
    if (f_prime) *f_prime = dv;
  });
}

wf_status wf_reaction_get_info(const wf_reaction* reaction, wf_reaction_info* out) {
  return guarded([&] {
    need(reaction, "reaction");
    need(out, "out");
    const auto& r = reaction->r;
    *out = {r.alpha_root(), r.f_prime_0(), r.f_prime_1(), r.mass_integral(), r.sup_norm(),
            reaction::validate_bistable(r).all_passed() ? 1 : 0};
  });
}

wf_status wf_heteroclinic_speed(const wf_reaction* reaction, double tol, double* c) {
  return guarded([&] {
    need(reaction, "reaction");
    need(c, "c");
    require(tol > 0.0, "tol must be positive");
    *c = phaseplane::heteroclinic_speed(reaction->r, tol);
  });
}

wf_status wf_stationary_solve(const wf_reaction* reaction, double r, double tol, wf_profile** out) {
  return guarded([&] {
    need(reaction, "reaction");
    need(out, "out");
    *out = new wf_profile{phaseplane::stationary_nonlocal(reaction->r, r, tol)};
  });
}

void wf_profile_free(wf_profile* profile) { delete profile; }

wf_status wf_profile_get_info(const wf_profile* profile, wf_profile_info* out) {
  return guarded([&] {
    need(profile, "profile");
    need(out, "out");
    const auto& p = profile->p;
    *out = {p.a, p.b, p.lambda_r, p.theta, p.upsilon, p.grad_l2_sq, p.slope_residual, p.identity_residual,
            p.resolution_limited ? 1 : 0};
  });
}

wf_status wf_profile_eval(const wf_profile* profile, double x, double* value, double* slope) {
  return guarded([&] {
    need(profile, "profile");
    const double v = profile->p.value(x);
    const double s = profile->p.slope(x);
    if (value) *value = v;
    if (slope) *slope = s;
  });
}

wf_evolve_params wf_evolve_defaults(void) {
  return {40.0, 800, WF_INITIAL_LINEAR_RAMP, 0.2, 0.8, WF_FUNCTIONAL_QUOTIENT, 150.0, 1e-8, 1e-8};
}

wf_status wf_evolve(const wf_reaction* reaction, const wf_evolve_params* params, wf_evolution** out) {
  return guarded([&] {
    need(reaction, "reaction");
    need(params, "params");
    need(out, "out");
    require(params->half_width > 0.0, "half_width must be positive");
    const GridSpec grid = GridSpec::from_cells(-params->half_width, params->half_width, params->cells);
    evolution::InitialData init;
    switch (params->initial) {
      case WF_INITIAL_LINEAR_RAMP: init = evolution::InitialData::linear_ramp(); break;
      case WF_INITIAL_SINE_MIX: init = evolution::InitialData::sine_mix(); break;
      case WF_INITIAL_STEP: init = evolution::InitialData::step(params->step_lo, params->step_hi); break;
      default: fail(ErrorKind::Precondition, "unknown initial data kind");
    }
    evolution::SpeedFunctional functional;
    switch (params->functional) {
      case WF_FUNCTIONAL_QUOTIENT: functional = evolution::SpeedFunctional::Quotient; break;
      case WF_FUNCTIONAL_POTENTIAL: functional = evolution::SpeedFunctional::Potential; break;
      case WF_FUNCTIONAL_INTEGRAL_MASS: functional = evolution::SpeedFunctional::IntegralMass; break;
      default: fail(ErrorKind::Precondition, "unknown speed functional");
    }
    require(params->final_time >= 0.0, "final_time must be >= 0");
    evolution::StepControl control;
    control.atol = params->atol;
    control.rtol = params->rtol;
    *out = new wf_evolution{evolution::evolve(reaction->r, grid, init, functional, params->final_time, control)};
  });
}

void wf_evolution_free(wf_evolution* evolution) { delete evolution; }

wf_status wf_evolution_final(const wf_evolution* evolution, double* lambda, double* gamma, double* t) {
  return guarded([&] {
    need(evolution, "evolution");
    if (lambda) *lambda = evolution->s.lambda;
    if (gamma) *gamma = evolution->s.gamma;
    if (t) *t = evolution->s.t;
  });
}

size_t wf_evolution_nodes(const wf_evolution* evolution) { return evolution ? evolution->s.v.size() : 0; }

wf_status wf_evolution_state(const wf_evolution* evolution, double* v, size_t n) {
  return guarded([&] {
    need(evolution, "evolution");
    need(v, "v");
    const size_t m = std::min(n, evolution->s.v.size());
    std::memcpy(v, evolution->s.v.data(), m * sizeof(double));
  });
}

size_t wf_evolution_history_length(const wf_evolution* evolution) {
  return evolution ? evolution->s.history.size() : 0;
}

wf_status wf_evolution_history(const wf_evolution* evolution, double* t, double* lambda, size_t n) {
  return guarded([&] {
    need(evolution, "evolution");
    const auto& h = evolution->s.history;
    const size_t m = std::min(n, h.size());
    for (size_t i = 0; i < m; ++i) {
      if (t) t[i] = h[i].t;
      if (lambda) lambda[i] = h[i].lambda;
    }
  });
}

wf_status wf_spectrum_compute(const wf_reaction* reaction, const wf_profile* profile, double dx,
                              wf_operator_kind kind, int discrete_basis, wf_spectrum** out) {
  return guarded([&] {
    need(reaction, "reaction");
    need(profile, "profile");
    need(out, "out");
    const GridSpec grid = spectrum::grid_for(profile->p, dx);
    const auto lin = discrete_basis ? spectrum::discrete_equilibrium(profile->p, grid, reaction->r)
                                    : spectrum::sample_profile(profile->p, grid);
    const auto matrix = kind == WF_OPERATOR_NONLOCAL ? spectrum::assemble_nonlocal(lin, reaction->r)
                                                     : spectrum::assemble_local(lin, reaction->r);
    *out = new wf_spectrum{spectrum::eigenvalues(matrix)};
  });
}

void wf_spectrum_free(wf_spectrum* spectrum) { delete spectrum; }

size_t wf_spectrum_size(const wf_spectrum* spectrum) { return spectrum ? spectrum->report.eigenvalues.size() : 0; }

wf_status wf_spectrum_eigenvalues(const wf_spectrum* spectrum, double* re, double* im, size_t n) {
  return guarded([&] {
    need(spectrum, "spectrum");
    const auto& ev = spectrum->report.eigenvalues;
    const size_t m = std::min(n, ev.size());
    for (size_t i = 0; i < m; ++i) {
      if (re) re[i] = ev[i].real();
      if (im) im[i] = ev[i].imag();
    }
  });
}

wf_status wf_spectrum_rightmost(const wf_spectrum* spectrum, double* re, double* im, int* is_real) {
  return guarded([&] {
    need(spectrum, "spectrum");
    const auto& r = spectrum->report;
    if (re) *re = r.rightmost.real();
    if (im) *im = r.rightmost.imag();
    if (is_real) *is_real = r.rightmost_is_real ? 1 : 0;
  });
}

wf_status wf_spectrum_check(const wf_spectrum* spectrum, double rho0, double phi, int* passed) {
  return guarded([&] {
    need(spectrum, "spectrum");
    need(passed, "passed");
    *passed = spectrum::stability_checks(spectrum->report, {rho0, phi}).passed ? 1 : 0;
  });
}

wf_status wf_dense_eigenvalues(const double* matrix, size_t n, double* re, double* im) {
  return guarded([&] {
    need(matrix, "matrix");
    need(re, "re");
    need(im, "im");
    require(n >= 1, "n must be positive");
    const auto ev = spectrum::dense_eigenvalues({matrix, matrix + n * n}, static_cast<int>(n));
    for (size_t i = 0; i < n; ++i) {
      re[i] = ev[i].real();
      im[i] = ev[i].imag();
    }
  });
}

wf_status wf_config_new(wf_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new wf_config{};
  });
}

void wf_config_free(wf_config* config) { delete config; }

wf_status wf_config_preset(wf_config* config, const char* name) {
  return guarded([&] {
    need(config, "config");
    need(name, "name");
    config->c.apply_preset(name);
  });
}

wf_status wf_config_load(wf_config* config, const char* path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    config->c.merge_file(path);
  });
}

wf_status wf_config_set(wf_config* config, const char* key, const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    config->c.set(key, value);
  });
}

wf_status wf_config_override(wf_config* config, const char* assignment) {
  return guarded([&] {
    need(config, "config");
    need(assignment, "assignment");
    config->c.apply_override(assignment);
  });
}

wf_status wf_config_get(const wf_config* config, const char* key, char* buffer, size_t size, size_t* needed) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    const std::string& v = config->c.get(key);
    if (needed) *needed = v.size() + 1;
    if (buffer && size > v.size()) std::memcpy(buffer, v.c_str(), v.size() + 1);
  });
}

wf_status wf_run(const char* command, const wf_config* config, const char* out_dir, wf_run_result** out) {
  return guarded([&] {
    need(command, "command");
    need(config, "config");
    need(out_dir, "out_dir");
    need(out, "out");
    const auto cmd = harness::parse_command(command);
    *out = new wf_run_result{harness::run(cmd, config->c, out_dir)};
  });
}

void wf_run_result_free(wf_run_result* result) { delete result; }

int wf_run_exit_code(const wf_run_result* result) { return result ? result->outcome.exit_code : 3; }

const char* wf_run_message(const wf_run_result* result) { return result ? result->outcome.message.c_str() : ""; }

const char* wf_run_summary_json(const wf_run_result* result) {
  return result ? result->outcome.summary_json.c_str() : "";
}

}  // extern "C"
