#include "salt/commands.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "salt/calibration.hpp"
#include "salt/errors.hpp"
#include "salt/field_ops.hpp"
#include "salt/robustness.hpp"
#include "salt/trajectory_io.hpp"

namespace salt {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ostream& log_of(const CommandContext& ctx) { return ctx.log ? *ctx.log : std::cerr; }

std::string field_csv(const ScalarField& f, const char* name) {
    std::ostringstream out;
    out << "i,j,x,y," << name << "\n";
    const Grid& g = f.grid();
    for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j)
            out << i << ',' << j << ',' << num(g.x(i)) << ',' << num(g.y(j)) << ',' << num(f(i, j)) << "\n";
    return out.str();
}

WaveVector calibration_k(const NoiseModel& model) {
    if (model.empty()) throw ConfigError("calibration needs at least one noise mode");
    return model.modes().front().k;
}

}  // namespace

CommandContext make_context(const fs::path& config_path, std::optional<std::uint64_t> seed,
                            std::optional<fs::path> output_dir, std::ostream& log) {
    CommandContext ctx;
    if (!config_path.empty()) ctx.config = load_config(config_path);
    if (seed) ctx.config.sim.seed = *seed;
    if (output_dir) ctx.config.output_dir = output_dir->string();
    ctx.output_dir = resolve_output_dir(ctx.config);
    ctx.log = &log;
    return ctx;
}

ScalarField load_initial_state(const CommandContext& ctx) {
    const Config& c = ctx.config;
    if (c.initial_state == "analytic") return initial_condition(c.sim.grid);
    const fs::path path = c.initial_state == "spinup" ? ctx.output_dir / "initial_state.bin"
                                                      : fs::path(c.initial_state);
    if (!fs::exists(path))
        throw MissingInputError("initial state not found: " + path.string() +
                                (c.initial_state == "spinup" ? " (run `salt spinup` first)" : ""));
    Trajectory t = read_trajectory(path);
    if (t.empty()) throw IoError(path.string() + ": contains no snapshot");
    require_same_grid(c.sim.grid, t.grid(), "initial state");
    return t.back();
}

void cmd_spinup(const CommandContext& ctx) {
    const Config& c = ctx.config;
    log_of(ctx) << "spin-up: " << c.spinup.duration << " time units at dt=" << c.spinup.dt << "\n";
    const SpinUpResult r = spin_up(c.sim, c.spinup);

    Trajectory state(c.sim.grid, c.spinup.dt, c.sim.seed, c.sim.noise);
    state.append(0.0, r.state);
    write_trajectory(ctx.output_dir / "initial_state.bin", state);
    write_text_atomic(ctx.output_dir / "initial_state.csv", field_csv(r.state, "omega"));

    std::ostringstream energy;
    energy << "t,energy\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) energy << num(r.times[i]) << ',' << num(r.energies[i]) << "\n";
    write_text_atomic(ctx.output_dir / "spinup_energy.csv", energy.str());
    log_of(ctx) << "spin-up: final energy " << (r.energies.empty() ? 0.0 : r.energies.back()) << "\n";
}

void cmd_simulate(const CommandContext& ctx) {
    const Config& c = ctx.config;
    const ScalarField omega0 = load_initial_state(ctx);
    const std::size_t steps = c.sim.steps();
    const BrownianPath path = steps == 0 ? BrownianPath(c.sim.dt, {}, c.sim.seed)
                                         : brownian_increments(steps, c.sim.dt, c.sim.seed);
    log_of(ctx) << "simulate: " << steps << " steps, writing every " << c.sim.snapshot_stride << "\n";

    TrajectoryWriter writer(ctx.output_dir / "trajectory.bin", c.sim.grid, c.sim.dt * c.sim.snapshot_stride,
                            c.sim.seed, c.sim.noise);
    std::ostringstream series;
    series << "t,energy,mean\n";
    run(omega0, c.sim, build_xi(c.sim.noise, c.sim.grid), path,
        [&](std::size_t, double t, const ScalarField& w) {
            writer.write(t, w);
            series << num(t) << ',' << num(kinetic_energy(w)) << ',' << num(mean(w)) << "\n";
        });
    writer.close();
    write_text_atomic(ctx.output_dir / "timeseries.csv", series.str());
    log_of(ctx) << "simulate: wrote " << writer.count() << " snapshots\n";
}

void cmd_calibrate(const CommandContext& ctx) {
    const Config& c = ctx.config;
    const fs::path path = ctx.trajectory.value_or(ctx.output_dir / "trajectory.bin");
    if (!fs::exists(path)) throw MissingInputError("trajectory file not found: " + path.string());
    TrajectoryReader reader(path);
    const TrajectoryHeader& h = reader.header();
    if (h.count < 2) throw EstimationError(path.string() + ": need at least 2 snapshots");

    const WaveVector k = calibration_k(h.noise.empty() ? c.sim.noise : h.noise);
    std::optional<double> alpha_true = true_alpha(h.noise, k);
    if (alpha_true && *alpha_true == 0.0) alpha_true.reset();

    const std::size_t available = h.count - 1;
    std::vector<std::size_t> n_list;
    for (std::size_t n : c.n_list) {
        if (n <= available)
            n_list.push_back(n);
        else
            log_of(ctx) << "calibrate: skipping N=" << n << " (only " << available << " increments)\n";
    }
    if (n_list.empty()) n_list.push_back(available);
    std::vector<std::size_t> strides{1};
    for (std::size_t s : strides_for(available, n_list))
        if (s != 1) strides.push_back(s);

    VorticityEstimator vort(h.grid, k, strides);
    std::optional<EnergyEstimator> energy;
    if (c.energy_route) energy.emplace(h.grid, std::vector<WaveVector>{k});
    while (auto rec = reader.next()) {
        vort.push(rec->first, rec->second);
        if (energy) energy->push(rec->first, rec->second);
    }

    CalibrationResult full = vort.estimate(0, alpha_true);
    if (energy) attach_energy_route(full, energy->energy_qv(), energy->gram());
    const auto rows = convergence_rows(vort, n_list, alpha_true);

    std::ostringstream conv;
    conv << "N,stride,samples,alpha_hat,relative_error,alpha_hat_unprojected\n";
    for (const auto& row : rows)
        conv << row.requested_n << ',' << row.stride << ',' << row.result.samples << ','
             << num(row.result.alpha_hat) << ','
             << (row.result.relative_error ? num(*row.result.relative_error) : std::string("nan")) << ','
             << num(row.result.alpha_hat_unprojected) << "\n";
    write_text_atomic(ctx.output_dir / "convergence.csv", conv.str());
    write_text_atomic(ctx.output_dir / "qv_field.csv", field_csv(vort.qv(0).values, "qv"));
    write_text_atomic(ctx.output_dir / "b_field.csv", field_csv(vort.b_field(0), "b"));
    write_text_atomic(ctx.output_dir / "weighted_b_field.csv", field_csv(vort.weighted_b_field(0), "b_sin2"));

    std::ostringstream report;
    report << "trajectory: " << path.string() << "\n"
           << "grid: " << h.grid.n() << "\n"
           << "snapshots: " << h.count << "\n"
           << "k: " << k.k1 << "," << k.k2 << "\n"
           << "horizon: " << num(full.horizon) << "\n"
           << "alpha_hat: " << num(full.alpha_hat) << "\n"
           << "alpha_true: " << (alpha_true ? num(*alpha_true) : std::string("unknown")) << "\n"
           << "relative_error: " << (full.relative_error ? num(*full.relative_error) : std::string("n/a")) << "\n"
           << "qv_mean: " << num(full.qv_mean) << "\n"
           << "weighted_b_mean: " << num(full.weighted_b_mean) << "\n"
           << "resolved_b_mean: " << num(full.resolved_b_mean) << "\n"
           << "alpha_hat_unprojected: " << num(full.alpha_hat_unprojected) << "\n";
    if (full.energy_qv) {
        report << "energy_qv: " << num(*full.energy_qv) << "\n"
               << "gram_eigenvalue: " << num(full.eigenvalues(0)) << "\n";
        if (full.alpha_tilde.size() > 0) report << "alpha_energy: " << num(full.alpha_tilde(0)) << "\n";
        if (full.energy_residual) report << "energy_residual: " << num(*full.energy_residual) << "\n";
    }
    write_text_atomic(ctx.output_dir / "calibration.txt", report.str());
    log_of(ctx) << report.str();
}

void cmd_robustness(const CommandContext& ctx) {
    const Config& c = ctx.config;
    const ScalarField omega0 = load_initial_state(ctx);
    SimParams params = c.sim;
    params.dt = c.robustness_dt;
    params.t_end = c.robustness_t_end;
    params.snapshot_stride = 1;
    params.validate();

    const VectorField xi1 = build_xi(c.sim.noise, c.sim.grid);
    const double xi_norm = l2_norm(xi1);
    if (xi_norm == 0.0) throw ConfigError("robustness study needs a nonzero noise field");
    const VectorField eta = unit_perturbation(c.perturbation_k, c.sim.grid);
    std::vector<double> deltas;
    for (double d : c.delta_list) deltas.push_back(d * xi_norm);
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < c.ensemble_size; ++i) seeds.push_back(c.sim.seed + i);

    log_of(ctx) << "robustness: " << deltas.size() << " perturbation sizes, " << seeds.size() << " seeds\n";
    const ScalingStudy study = scaling_study(omega0, xi1, eta, deltas, params, seeds, c.gronwall);

    std::ostringstream scaling;
    scaling << "delta_relative,delta,xi_distance,sup_distance,sup_distance_p,gamma,fitted_constant\n";
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const auto& r = study.rows[i];
        scaling << num(c.delta_list[i]) << ',' << num(r.delta) << ',' << num(r.xi_distance) << ','
                << num(r.sup_distance) << ',' << num(r.sup_distance_p) << ',' << num(r.gamma) << ','
                << num(r.fitted_constant) << "\n";
    }
    write_text_atomic(ctx.output_dir / "scaling.csv", scaling.str());

    // Detailed diagnostics for the largest perturbation on the first seed.
    double largest = 0.0;
    for (double d : deltas) largest = std::max(largest, std::abs(d));
    const PairedRun pair = paired_simulate(omega0, omega0, xi1, xi1 + largest * eta, params);
    const RobustnessReport dist = distance_series(pair);
    std::ostringstream series;
    series << "t,distance\n";
    for (std::size_t i = 0; i < dist.times.size(); ++i) series << num(dist.times[i]) << ',' << num(dist.distances[i]) << "\n";
    write_text_atomic(ctx.output_dir / "distance_series.csv", series.str());

    std::ostringstream lemma;
    lemma << "t,q,q_bound,a_total,a_total_bound,b_total,b_total_bound,a,b,c,c_magnitude,residual,advection\n";
    double worst_residual = 0.0, worst_c = 0.0;
    const std::size_t every = std::max<std::size_t>(1, pair.first.size() / 20);
    for (std::size_t s = 0; s < pair.first.size(); s += every) {
        const LemmaTerms t = lemma_terms(pair, s, c.gronwall.sobolev_order);
        worst_residual = std::max(worst_residual, std::abs(t.decomposition_residual()));
        worst_c = std::max(worst_c, std::abs(t.c + t.c_magnitude));
        lemma << num(t.time) << ',' << num(t.q) << ',' << num(t.q_bound) << ',' << num(t.a_total) << ','
              << num(t.a_total_bound) << ',' << num(t.b_total) << ',' << num(t.b_total_bound) << ','
              << num(t.a) << ',' << num(t.b) << ',' << num(t.c) << ',' << num(t.c_magnitude) << ','
              << num(t.decomposition_residual()) << ',' << num(t.advection) << "\n";
    }
    write_text_atomic(ctx.output_dir / "lemma_terms.csv", lemma.str());

    std::ostringstream summary;
    summary << "xi_norm: " << num(xi_norm) << "\n"
            << "perturbation_k: " << c.perturbation_k.k1 << "," << c.perturbation_k.k2 << "\n"
            << "seeds: " << seeds.size() << "\n"
            << "loglog_slope: " << num(study.slope) << "\n"
            << "max_split_residual: " << num(worst_residual) << "\n"
            << "max_c_identity_residual: " << num(worst_c) << "\n"
            << "note: bounds use the L2 norm of the initial difference\n";
    write_text_atomic(ctx.output_dir / "robustness.txt", summary.str());
    log_of(ctx) << summary.str();
}

std::size_t cmd_report(const CommandContext& ctx) {
    static const char* const artifacts[] = {
        "initial_state.bin", "initial_state.csv", "spinup_energy.csv", "trajectory.bin",
        "timeseries.csv",    "calibration.txt",   "convergence.csv",   "qv_field.csv",
        "b_field.csv",       "scaling.csv",       "distance_series.csv", "lemma_terms.csv",
        "robustness.txt",
    };
    std::ostringstream out;
    std::size_t found = 0;
    for (const char* name : artifacts) {
        const fs::path p = ctx.output_dir / name;
        if (!fs::exists(p)) continue;
        ++found;
        out << "[" << name << "] " << fs::file_size(p) << " bytes\n";
    }
    if (found == 0) {
        log_of(ctx) << "warning: no artifacts in " << ctx.output_dir.string() << "; report is empty\n";
        return 0;
    }
    for (const char* name : {"calibration.txt", "convergence.csv", "robustness.txt", "scaling.csv"}) {
        const fs::path p = ctx.output_dir / name;
        if (!fs::exists(p)) continue;
        std::ifstream in(p);
        out << "\n== " << name << " ==\n" << in.rdbuf();
    }
    write_text_atomic(ctx.output_dir / "report.txt", out.str());
    std::cout << out.str();
    return found;
}

int exit_code_for(const std::exception& e) {
    return dynamic_cast<const MissingInputError*>(&e) ? 2 : 1;
}

}  // namespace salt
