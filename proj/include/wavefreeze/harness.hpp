#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "wavefreeze/config.hpp"
#include "wavefreeze/errors.hpp"
#include "wavefreeze/evolution.hpp"
#include "wavefreeze/grid.hpp"
#include "wavefreeze/reaction.hpp"

/// Experiment orchestration behind the command line: each command reads a
/// Config, runs the numerics and writes its artifacts plus summary.json into
/// an output directory.
namespace wavefreeze::harness {

enum class Command { Evolve, Stationary, Speed, Spectrum, Validate, Sweep };

const char* to_string(Command command);
/// Throws Config for an unknown name.
Command parse_command(const std::string& name);

/// 2 config/precondition/io, 3 numeric/domain/degenerate, 4 no solution.
int exit_code_for(ErrorKind kind);

struct RunOutcome {
  int exit_code = 0;
  std::string summary_json;  // the content of summary.json
  std::string message;       // one line for the terminal
};

/// Never throws: failures become an exit code and an error summary.json.
RunOutcome run(Command command, const config::Config& config, const std::filesystem::path& out_dir);

reaction::BistableReaction make_reaction(const config::Config& config);
GridSpec make_grid(const config::Config& config);
evolution::InitialData make_initial(const config::Config& config, const reaction::BistableReaction& reaction,
                                    const GridSpec& grid);
/// sqrt(2) (alpha - 1/2) for the Nagumo cubic, empty otherwise.
std::optional<double> exact_speed(const reaction::BistableReaction& reaction);

}  // namespace wavefreeze::harness
