#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wavefreeze/wavefreeze.h"

namespace {

int report(wf_status status, const char* what) {
  std::fprintf(stderr, "wavefreeze: %s: %s (%s)\n", what, wf_last_error(), wf_status_string(status));
  return wf_exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Travelling fronts of bistable reaction-diffusion equations by freezing, shooting and spectra"};
  app.set_version_flag("--version", std::string(wf_version()));

  std::string command;
  std::string config_path;
  std::string out_dir = "wavefreeze-out";
  std::string preset;
  std::vector<std::string> overrides;
  bool print_summary = false;

  app.add_option("command", command, "evolve | stationary | speed | spectrum | validate | sweep")
      ->required()
      ->check(CLI::IsMember({"evolve", "stationary", "speed", "spectrum", "validate", "sweep"}));
  app.add_option("--config,-c", config_path, "configuration file with key = value lines");
  app.add_option("--out,-o", out_dir, "output directory")->capture_default_str();
  app.add_option("--preset,-p", preset, "ex-linini | ex-kt | ex-nbc, applied before the file");
  app.add_option("--override,-s", overrides, "key=value, applied after the file (repeatable)");
  app.add_flag("--summary", print_summary, "print summary.json to stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (config_path.empty() && preset.empty()) {
    std::fprintf(stderr, "wavefreeze: one of --config or --preset is required\n");
    return 2;
  }

  wf_config* config = nullptr;
  wf_status status = wf_config_new(&config);
  if (status != WF_OK) return report(status, "configuration");
  if (!preset.empty() && (status = wf_config_preset(config, preset.c_str())) != WF_OK) {
    wf_config_free(config);
    return report(status, "preset");
  }
  if (!config_path.empty() && (status = wf_config_load(config, config_path.c_str())) != WF_OK) {
    wf_config_free(config);
    return report(status, "config file");
  }
  for (const auto& o : overrides) {
    if ((status = wf_config_override(config, o.c_str())) != WF_OK) {
      wf_config_free(config);
      return report(status, "override");
    }
  }

  wf_run_result* result = nullptr;
  status = wf_run(command.c_str(), config, out_dir.c_str(), &result);
  wf_config_free(config);
  if (status != WF_OK) return report(status, command.c_str());

  const int code = wf_run_exit_code(result);
  if (code == 0)
    std::printf("%s\n", wf_run_message(result));
  else
    std::fprintf(stderr, "wavefreeze %s: %s\n", command.c_str(), wf_run_message(result));
  if (print_summary) std::fputs(wf_run_summary_json(result), stdout);
  wf_run_result_free(result);
  return code;
}
