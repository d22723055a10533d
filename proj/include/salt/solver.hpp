#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "salt/field.hpp"
#include "salt/noise.hpp"

namespace salt {

enum class NoiseScheme {
    /// Noise increment inside every SSPRK3 stage; converges to the
    /// Stratonovich solution.
    stratonovich_ssprk3,
    /// Euler-Maruyama on the Ito form with the 1/2 xi.grad(xi.grad w) drift.
    ito_euler,
};

/// Forced, damped SALT Euler model on the unit torus:
///   d w + u.grad w dt + xi.grad w o dW = (Q - r w) dt,
///   Q = forcing_amplitude * (cos(8 pi y) + sin(8 pi x)).
struct SimParams {
    Grid grid{64};
    double dt = 5e-6;
    double t_end = 1.0;
    double damping = 0.001;
    double forcing_amplitude = 0.01;
    NoiseModel noise = NoiseModel::single({2, 4}, 0.001);
    std::uint64_t seed = 20210125;
    bool advection = true;
    NoiseScheme scheme = NoiseScheme::stratonovich_ssprk3;
    std::size_t snapshot_stride = 1;
    /// A warning is printed once when the advective Courant number exceeds this.
    double cfl_warning = 1.0;

    /// Number of time steps; throws ConfigError when t_end is not an integer
    /// multiple of dt or the stride does not divide it.
    std::size_t steps() const;
    void validate() const;

    bool operator==(const SimParams&) const = default;
};

ScalarField forcing_field(const Grid& grid, double amplitude);

/// sin(8 pi x) sin(8 pi y) + 0.4 cos(6 pi x) cos(6 pi y) + 0.3 cos(10 pi x) cos(4 pi y)
///   + 0.02 sin(2 pi y) + 0.02 sin(2 pi x); needs n >= 32.
ScalarField initial_condition(const Grid& grid);

/// Time-ordered vorticity snapshots plus the metadata needed to interpret them.
class Trajectory {
public:
    Trajectory(Grid grid, double dt, std::uint64_t seed, NoiseModel noise);

    const Grid& grid() const { return grid_; }
    double dt() const { return dt_; }
    std::uint64_t seed() const { return seed_; }
    const NoiseModel& noise() const { return noise_; }

    /// Throws DimensionError on grid mismatch, std::invalid_argument when t
    /// does not increase.
    void append(double t, ScalarField omega);

    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<ScalarField>& snapshots() const { return snapshots_; }
    const ScalarField& operator[](std::size_t i) const { return snapshots_[i]; }
    const ScalarField& back() const { return snapshots_.back(); }

    bool operator==(const Trajectory&) const = default;

private:
    Grid grid_;
    double dt_;
    std::uint64_t seed_;
    NoiseModel noise_;
    std::vector<double> times_;
    std::vector<ScalarField> snapshots_;
};

/// Called with (step index, time, vorticity) for every emitted snapshot.
using SnapshotObserver = std::function<void(std::size_t, double, const ScalarField&)>;

/// Pseudo-spectral right-hand side and time stepping for one parameter set.
///
/// The state is kept as dealiased spectral coefficients. Every quadratic
/// product is formed on the grid and truncated by the 2/3 rule, which makes
/// advection and transport exactly skew-adjoint on the retained band.
class SaltStepper {
public:
    SaltStepper(const SimParams& params, VectorField xi);
    ~SaltStepper();
    SaltStepper(SaltStepper&&) noexcept;
    SaltStepper& operator=(SaltStepper&&) noexcept;

    const Grid& grid() const;

    /// Projects a physical field onto the retained band.
    SpectralField project(const ScalarField& omega) const;
    ScalarField physical(const SpectralField& omega_hat);

    /// Advances omega_hat by one dt with Brownian increment dw.
    void step(SpectralField& omega_hat, double dw);

    /// -u.grad w + Q - r w (advection term dropped when disabled).
    SpectralField deterministic_rhs(const SpectralField& omega_hat);

    /// Courant number (max|u| dt + max|xi| |dw|) / h of the last step.
    double last_courant() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Physical-space wrappers around SaltStepper, mainly for testing.
ScalarField deterministic_rhs(const ScalarField& omega, const SimParams& params);
ScalarField ssprk3_step(const ScalarField& omega, const SimParams& params, const VectorField& xi,
                        double dw);

/// Runs from omega0 with the given noise field and Brownian path (one
/// increment per step) and hands every stride-th state to the observer,
/// starting with the projected omega0 at t = 0. Throws BlowUpError with the
/// step index when the state stops being finite.
void run(const ScalarField& omega0, const SimParams& params, const VectorField& xi,
         const BrownianPath& path, const SnapshotObserver& observer);

/// Collects the snapshots of `run` with xi built from params.noise and the
/// path drawn from params.seed.
Trajectory simulate(const ScalarField& omega0, const SimParams& params);
Trajectory simulate(const ScalarField& omega0, const SimParams& params, const VectorField& xi,
                    const BrownianPath& path);

struct SpinUpParams {
    double duration = 10.0;
    double dt = 1e-3;
    double alpha = 1e-6;
    /// Abort when the energy leaves (0, blowup_factor * e0).
    double blowup_factor = 10.0;

    bool operator==(const SpinUpParams&) const = default;
};

struct SpinUpResult {
    ScalarField state;
    std::vector<double> times;
    std::vector<double> energies;
};

/// Integrates initial_condition forward with the noise amplitudes of
/// params.noise replaced by spin.alpha. The Brownian path is drawn from a
/// seed derived from params.seed so it does not repeat the data path.
SpinUpResult spin_up(const SimParams& params, const SpinUpParams& spin);

}  // namespace salt
