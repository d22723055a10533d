#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "salt/robustness.hpp"
#include "salt/solver.hpp"

namespace salt {

/// Everything the command-line pipeline needs. Defaults reproduce the
/// reference experiment: 64^2 grid, r = 0.001, forcing amplitude 0.01, one
/// noise mode k = (2,4) with alpha = 0.001 (1e-6 during spin-up), T = 1 and
/// 200000 steps.
struct Config {
    SimParams sim;
    SpinUpParams spinup;
    /// "spinup" (use <output_dir>/initial_state.bin), "analytic", or a file path.
    std::string initial_state = "spinup";
    std::vector<std::size_t> n_list{2500, 5000, 10000, 20000, 40000, 50000, 66667, 100000, 200000};
    bool energy_route = true;

    /// Perturbation sizes relative to ||xi1||_2.
    std::vector<double> delta_list{0.0, 1e-4, 3.1622776601683795e-4, 1e-3, 3.1622776601683795e-3, 1e-2};
    WaveVector perturbation_k{1, 3};
    double robustness_dt = 1e-3;
    double robustness_t_end = 1.0;
    std::size_t ensemble_size = 8;
    GronwallConstants gronwall;

    /// Empty means: $SALT_OUTPUT_DIR, else ./salt_out.
    std::string output_dir;

    bool operator==(const Config&) const = default;
};

/// Parses UTF-8 key=value lines; '#' starts a comment, blank lines are
/// ignored. Unknown keys, malformed values and inconsistent combinations
/// throw ConfigError naming the line.
Config parse_config(std::string_view text);

/// Renders every key; parse_config(render_config(c)) == c.
std::string render_config(const Config& config);

Config load_config(const std::filesystem::path& path);

/// Output directory after applying the environment fallback.
std::filesystem::path resolve_output_dir(const Config& config);

}  // namespace salt
