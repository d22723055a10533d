// salt: spin-up, simulate, calibrate, robustness and report commands.
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "salt/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stochastic 2D Euler (SALT) calibration toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<std::string> trajectory;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "key=value config file");
        cmd->add_option("--seed", seed, "override the random seed");
        cmd->add_option("-o,--output-dir", output_dir, "artifact directory");
    };
    auto* spinup = app.add_subcommand("spinup", "spin up to a statistically steady initial state");
    auto* simulate = app.add_subcommand("simulate", "generate a trajectory file");
    auto* calibrate = app.add_subcommand("calibrate", "estimate the noise amplitude from a trajectory");
    auto* robustness = app.add_subcommand("robustness", "perturbation scaling study");
    auto* report = app.add_subcommand("report", "summarize the artifacts in the output directory");
    for (auto* cmd : {spinup, simulate, calibrate, robustness, report}) add_common(cmd);
    calibrate->add_option("-t,--trajectory", trajectory, "trajectory file (default <output-dir>/trajectory.bin)");

    CLI11_PARSE(app, argc, argv);

    try {
        std::optional<std::filesystem::path> out;
        if (output_dir) out = *output_dir;
        salt::CommandContext ctx = salt::make_context(config_path, seed, out, std::cerr);
        if (trajectory) ctx.trajectory = *trajectory;

        if (*spinup)
            salt::cmd_spinup(ctx);
        else if (*simulate)
            salt::cmd_simulate(ctx);
        else if (*calibrate)
            salt::cmd_calibrate(ctx);
        else if (*robustness)
            salt::cmd_robustness(ctx);
        else if (*report)
            salt::cmd_report(ctx);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return salt::exit_code_for(e);
    }
    return 0;
}
