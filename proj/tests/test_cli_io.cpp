#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "salt/commands.hpp"
#include "salt/config.hpp"
#include "salt/errors.hpp"
#include "salt/trajectory_io.hpp"
#include "test_support.hpp"

using namespace salt;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("salt_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Trajectory small_trajectory() {
    SimParams p;
    p.grid = Grid(32);
    p.dt = 1e-3;
    p.t_end = 0.01;
    p.noise = NoiseModel({{{2, 4}, 0.001}, {{1, -3}, 0.002}});
    return simulate(initial_condition(p.grid), p);
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
    const Config c = parse_config("");
    EXPECT_EQ(c, Config{});
    EXPECT_EQ(c.sim.grid.n(), 64);
    EXPECT_DOUBLE_EQ(c.sim.damping, 0.001);
    EXPECT_DOUBLE_EQ(c.sim.forcing_amplitude, 0.01);
    EXPECT_DOUBLE_EQ(c.sim.noise.modes().at(0).alpha, 0.001);
    EXPECT_EQ(c.sim.noise.modes().at(0).k, (WaveVector{2, 4}));
    EXPECT_DOUBLE_EQ(c.spinup.alpha, 1e-6);
    EXPECT_DOUBLE_EQ(c.sim.t_end, 1.0);
    EXPECT_EQ(c.sim.steps(), 200000u);
    EXPECT_EQ(c.n_list.back(), 200000u);
}

TEST(Config, OddGridRejected) { EXPECT_THROW(parse_config("grid_n=63"), ConfigError); }

TEST(Config, SingleModeParsesAndRendersToFixpoint) {
    const Config c = parse_config("alpha=0.001\nk=2,4");
    ASSERT_EQ(c.sim.noise.modes().size(), 1u);
    EXPECT_EQ(c.sim.noise.modes()[0], (NoiseMode{{2, 4}, 0.001}));
    const std::string text = render_config(c);
    EXPECT_EQ(parse_config(text), c);
    EXPECT_EQ(render_config(parse_config(text)), text);
}

TEST(Config, FixpointOnNonDefaultValues) {
    const std::string src =
        "# comment line\n"
        "grid_n = 32   # trailing comment\n"
        "dt=0.001\n t_end=0.5\n"
        "k=2,4;1,-3\nalpha=0.001,0.1\n"
        "seed=7\nadvection=false\nscheme=ito_euler\nsnapshot_stride=5\n"
        "n_list=10,20\ndelta_list=0,0.1\nperturbation_k=1,2\n"
        "energy_route=0\nensemble_size=3\ngronwall_k=2\ngronwall_p=3\n"
        "initial_state=analytic\noutput_dir=/tmp/x\n"
        "spinup_t_end=1\nspinup_dt=0.01\n";
    const Config c = parse_config(src);
    EXPECT_EQ(c.sim.grid.n(), 32);
    EXPECT_EQ(c.sim.noise.modes().size(), 2u);
    EXPECT_EQ(c.sim.scheme, NoiseScheme::ito_euler);
    EXPECT_FALSE(c.sim.advection);
    EXPECT_FALSE(c.energy_route);
    EXPECT_EQ(c.sim.seed, 7u);
    EXPECT_EQ(parse_config(render_config(c)), c);
}

TEST(Config, ErrorsNameTheProblem) {
    auto message = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("bogus=1").find("unknown key"), std::string::npos);
    EXPECT_NE(message("\n\ndt=abc").find("line 3"), std::string::npos);
    EXPECT_NE(message("dt=0.3").find("multiple"), std::string::npos);
    EXPECT_NE(message("k=2,4;1,1").find("modes"), std::string::npos);
    EXPECT_NE(message("k=40,1").find("no error"), 0u);
    EXPECT_NE(message("no_equals_sign").find("key=value"), std::string::npos);
    EXPECT_THROW(parse_config("advection=maybe"), ConfigError);
    EXPECT_THROW(parse_config("scheme=euler"), ConfigError);
    EXPECT_THROW(parse_config("snapshot_stride=3"), ConfigError);
}

TEST(Config, OutputDirFallsBackToEnvironment) {
    Config c;
    ::setenv("SALT_OUTPUT_DIR", "/tmp/from_env", 1);
    EXPECT_EQ(resolve_output_dir(c), fs::path("/tmp/from_env"));
    c.output_dir = "explicit";
    EXPECT_EQ(resolve_output_dir(c), fs::path("explicit"));
    ::unsetenv("SALT_OUTPUT_DIR");
    EXPECT_EQ(resolve_output_dir(Config{}), fs::path("salt_out"));
}

TEST(TrajectoryFile, RoundTripIsBitExact) {
    const fs::path dir = scratch_dir("roundtrip");
    const Trajectory t = small_trajectory();
    write_trajectory(dir / "t.bin", t);
    const Trajectory back = read_trajectory(dir / "t.bin");
    EXPECT_TRUE(back == t);
    EXPECT_EQ(back.seed(), t.seed());
    EXPECT_EQ(back.noise(), t.noise());
    EXPECT_FALSE(fs::exists(dir / "t.bin.tmp"));
    // Header plus records: 40 + 2 * 16 + 11 * 8 * (1 + 32 * 32)
    EXPECT_EQ(fs::file_size(dir / "t.bin"), 40u + 32u + 11u * 8u * 1025u);
    fs::remove_all(dir);
}

TEST(TrajectoryFile, TruncationNamesTheRecord) {
    const fs::path dir = scratch_dir("trunc");
    write_trajectory(dir / "t.bin", small_trajectory());
    const auto full = fs::file_size(dir / "t.bin");
    fs::resize_file(dir / "t.bin", full - 100);
    try {
        read_trajectory(dir / "t.bin");
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("record 10"), std::string::npos) << e.what();
    }
    fs::remove_all(dir);
}

TEST(TrajectoryFile, VersionAndMagicChecked) {
    const fs::path dir = scratch_dir("version");
    write_trajectory(dir / "t.bin", small_trajectory());
    std::string bytes = slurp(dir / "t.bin");
    bytes[4] = 2;  // version u32 little-endian
    std::ofstream(dir / "v2.bin", std::ios::binary) << bytes;
    try {
        read_trajectory(dir / "v2.bin");
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("unsupported version 2"), std::string::npos) << e.what();
    }
    bytes[4] = 1;
    bytes[0] = 'X';
    std::ofstream(dir / "magic.bin", std::ios::binary) << bytes;
    EXPECT_THROW(read_trajectory(dir / "magic.bin"), IoError);
    bytes[0] = 'S';
    std::ofstream(dir / "extra.bin", std::ios::binary) << bytes << "junk";
    EXPECT_THROW(read_trajectory(dir / "extra.bin"), IoError);
    EXPECT_THROW(read_trajectory(dir / "missing.bin"), MissingInputError);
    fs::remove_all(dir);
}

TEST(TrajectoryFile, WriterRejectsBadRecordsAndCleansUp) {
    const fs::path dir = scratch_dir("writer");
    {
        TrajectoryWriter w(dir / "t.bin", Grid(32), 0.1, 1, NoiseModel{});
        w.write(0.0, ScalarField(Grid(32)));
        EXPECT_THROW(w.write(0.0, ScalarField(Grid(32))), std::invalid_argument);
        EXPECT_THROW(w.write(1.0, ScalarField(Grid(64))), DimensionError);
        // Destroyed without close: nothing appears under the final name.
    }
    EXPECT_FALSE(fs::exists(dir / "t.bin"));
    EXPECT_FALSE(fs::exists(dir / "t.bin.tmp"));
    fs::remove_all(dir);
}

namespace {

CommandContext quick_context(const fs::path& dir, const std::string& extra = "") {
    std::ostringstream cfg;
    cfg << "grid_n=32\ndt=0.001\nt_end=0.05\nspinup_t_end=0.1\nspinup_dt=0.01\n"
        << "n_list=10,25,50\nrobustness_t_end=0.05\nensemble_size=2\n"
        << "delta_list=0,0.001,0.01\nk=2,4\nalpha=0.01\n"
        << extra;
    const fs::path cfg_path = dir / "run.cfg";
    std::ofstream(cfg_path) << cfg.str();
    static std::ostringstream sink;
    return make_context(cfg_path, std::nullopt, dir / "out", sink);
}

}  // namespace

TEST(Commands, PipelineProducesArtifacts) {
    const fs::path dir = scratch_dir("pipeline");
    const CommandContext ctx = quick_context(dir);
    EXPECT_THROW(cmd_simulate(ctx), MissingInputError);
    cmd_spinup(ctx);
    cmd_simulate(ctx);
    cmd_calibrate(ctx);
    cmd_robustness(ctx);
    for (const char* name : {"initial_state.bin", "initial_state.csv", "spinup_energy.csv", "trajectory.bin",
                             "timeseries.csv", "calibration.txt", "convergence.csv", "qv_field.csv",
                             "b_field.csv", "scaling.csv", "distance_series.csv", "lemma_terms.csv",
                             "robustness.txt"})
        EXPECT_TRUE(fs::exists(ctx.output_dir / name)) << name;
    EXPECT_EQ(read_trajectory(ctx.output_dir / "trajectory.bin").size(), 51u);
    const std::string conv = slurp(ctx.output_dir / "convergence.csv");
    EXPECT_EQ(std::count(conv.begin(), conv.end(), '\n'), 4);
    EXPECT_GT(cmd_report(ctx), 10u);
    EXPECT_TRUE(fs::exists(ctx.output_dir / "report.txt"));
    fs::remove_all(dir);
}

TEST(Commands, DeterministicGivenSeed) {
    const fs::path dir = scratch_dir("determinism");
    const CommandContext ctx = quick_context(dir, "initial_state=analytic\n");
    cmd_simulate(ctx);
    const std::string first = slurp(ctx.output_dir / "trajectory.bin");
    cmd_simulate(ctx);
    EXPECT_EQ(slurp(ctx.output_dir / "trajectory.bin"), first);
    std::ostringstream sink;
    CommandContext other = make_context(dir / "run.cfg", 99, dir / "out", sink);
    cmd_simulate(other);
    EXPECT_NE(slurp(ctx.output_dir / "trajectory.bin"), first);
    fs::remove_all(dir);
}

TEST(Commands, MissingTrajectoryAndEmptyReport) {
    const fs::path dir = scratch_dir("missing");
    const CommandContext ctx = quick_context(dir);
    try {
        cmd_calibrate(ctx);
        FAIL() << "expected MissingInputError";
    } catch (const MissingInputError& e) {
        EXPECT_NE(std::string(e.what()).find("trajectory.bin"), std::string::npos);
        EXPECT_EQ(exit_code_for(e), 2);
    }
    EXPECT_EQ(cmd_report(ctx), 0u);
    EXPECT_EQ(exit_code_for(ConfigError("x")), 1);
    fs::remove_all(dir);
}
