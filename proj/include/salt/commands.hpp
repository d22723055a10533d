#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "salt/config.hpp"

namespace salt {

/// Settings shared by every subcommand. Empty optionals keep the config value.
struct CommandContext {
    Config config;
    std::filesystem::path output_dir;
    /// Overrides <output_dir>/trajectory.bin for calibrate.
    std::optional<std::filesystem::path> trajectory;
    std::ostream* log = nullptr;
};

/// Loads the config file (defaults when path is empty), applies overrides and
/// resolves the output directory.
CommandContext make_context(const std::filesystem::path& config_path, std::optional<std::uint64_t> seed,
                            std::optional<std::filesystem::path> output_dir, std::ostream& log);

/// Initial vorticity selected by config.initial_state. Throws
/// MissingInputError when a required file is absent.
ScalarField load_initial_state(const CommandContext& ctx);

// Each command writes its artifacts into ctx.output_dir. Failures surface as
// exceptions from errors.hpp.
void cmd_spinup(const CommandContext& ctx);
void cmd_simulate(const CommandContext& ctx);
void cmd_calibrate(const CommandContext& ctx);
void cmd_robustness(const CommandContext& ctx);
/// Returns the number of artifacts summarized; zero prints a warning.
std::size_t cmd_report(const CommandContext& ctx);

/// Exit status for an exception escaping a command: 2 for missing inputs,
/// 1 otherwise.
int exit_code_for(const std::exception& e);

}  // namespace salt
