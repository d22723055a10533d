#pragma once

#include <cstdint>
#include <vector>

#include "salt/field.hpp"
#include "salt/noise.hpp"
#include "salt/solver.hpp"

namespace salt {

/// Two solutions driven by one Brownian path with possibly different noise
/// fields and initial data.
struct PairedRun {
    Trajectory first;
    Trajectory second;
    VectorField xi_first;
    VectorField xi_second;
};

/// Steps both members with the increments drawn from params.seed. Throws
/// DimensionError when the fields do not share params.grid.
PairedRun paired_simulate(const ScalarField& omega0_first, const ScalarField& omega0_second,
                          const VectorField& xi_first, const VectorField& xi_second,
                          const SimParams& params);

/// Same, with an explicit path.
PairedRun paired_simulate(const ScalarField& omega0_first, const ScalarField& omega0_second,
                          const VectorField& xi_first, const VectorField& xi_second,
                          const SimParams& params, const BrownianPath& path);

struct RobustnessReport {
    std::vector<double> times;
    /// ||w1 - w2||_2 at each snapshot.
    std::vector<double> distances;
    double sup_distance = 0.0;
    double initial_distance = 0.0;
    double xi_distance = 0.0;
};

RobustnessReport distance_series(const PairedRun& pair);
/// Distance series between two arbitrary trajectories on the same time stamps.
RobustnessReport distance_series(const Trajectory& a, const Trajectory& b);

/// Constants of the discount gamma(T) = c1 int_0^T ||w_s||_{k,2}^p ds + c2 T^p.
/// The theorem only asserts they exist; the defaults are placeholders.
struct GronwallConstants {
    double c1 = 1.0;
    double c2 = 1.0;
    int sobolev_order = 3;
    double p = 2.0;

    bool operator==(const GronwallConstants&) const = default;
};

/// Trapezoidal gamma(T) over the snapshots of traj, interpolating linearly at
/// T. Throws std::invalid_argument for a negative Sobolev order or T outside
/// the trajectory's time span.
double gronwall_discount(const Trajectory& traj, double horizon, const GronwallConstants& constants);

/// Inner products from the stability estimates for the difference of two
/// solutions at one snapshot, with the unit-constant right-hand sides.
struct LemmaTerms {
    double time = 0.0;
    /// |<wbar, xi1.grad w1 - xi2.grad w2>|
    double q = 0.0;
    /// ||xi1.grad w1 - xi2.grad w2||^2
    double a_total = 0.0;
    /// <wbar, xi1.grad(xi1.grad w1) - xi2.grad(xi2.grad w2)> and its split
    double b_total = 0.0;
    double a = 0.0;  // <wbar, xibar.grad(xi1.grad w1)>
    double b = 0.0;  // <wbar, xi2.grad(xibar.grad w1)>
    double c = 0.0;  // <wbar, xi2.grad(xi2.grad wbar)>
    /// ||xi2.grad wbar||^2, equal to -c
    double c_magnitude = 0.0;
    /// <wbar, u2.grad wbar>, zero for divergence-free u2
    double advection = 0.0;

    double q_bound = 0.0;
    double a_total_bound = 0.0;
    double b_total_bound = 0.0;

    double decomposition_residual() const { return b_total - (a + b + c); }
};

LemmaTerms lemma_terms(const PairedRun& pair, std::size_t snapshot, int sobolev_order = 3);

/// grad_perp cos(2 pi k.x) scaled to unit L2 norm.
VectorField unit_perturbation(WaveVector k, const Grid& grid);

struct ScalingRow {
    double delta = 0.0;
    double xi_distance = 0.0;
    /// Ensemble mean of sup_t ||w1 - w2||_2 and of its p-th power.
    double sup_distance = 0.0;
    double sup_distance_p = 0.0;
    /// Ensemble mean of gamma(T) for the first member.
    double gamma = 0.0;
    /// sup_distance_p / (||w1_0 - w2_0||^p + ||xibar||^p); NaN when both vanish.
    double fitted_constant = 0.0;
    std::vector<double> per_seed_sup;
};

struct ScalingStudy {
    std::vector<ScalingRow> rows;
    /// Least-squares slope of log(sup distance) against log(||xibar||) over
    /// rows with positive delta.
    double slope = 0.0;
};

/// For each delta, pairs xi1 against xi1 + delta * eta (eta of unit norm) from
/// equal initial data, once per seed, and averages the sup distances.
ScalingStudy scaling_study(const ScalarField& omega0, const VectorField& xi1, const VectorField& eta,
                           const std::vector<double>& deltas, const SimParams& params,
                           const std::vector<std::uint64_t>& seeds,
                           const GronwallConstants& constants = {});

/// Least-squares slope of log(y) against log(x); throws std::invalid_argument
/// with fewer than two positive pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace salt
