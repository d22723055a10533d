#include "salt/solver.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "salt/field_ops.hpp"
#include "salt/spectral.hpp"

namespace salt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

// Offset mixed into the data seed so the spin-up path is a different stream.
constexpr std::uint64_t kSpinUpSeedMix = 0x9E3779B97F4A7C15ULL;

bool all_finite(const SpectralField& c) {
    for (const auto& z : c.coeffs())
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameters and fixed fields

std::size_t SimParams::steps() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
    const double ratio = t_end / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg << "t_end=" << t_end << " is not an integer multiple of dt=" << dt;
        throw ConfigError(msg.str());
    }
    const auto n = static_cast<std::size_t>(rounded);
    if (snapshot_stride == 0) throw ConfigError("snapshot_stride must be >= 1");
    if (n % snapshot_stride != 0) throw ConfigError("snapshot_stride must divide the step count");
    return n;
}

void SimParams::validate() const {
    steps();
    if (damping < 0.0) throw ConfigError("damping must be non-negative");
    for (const auto& m : noise.modes()) require_resolvable(m.k, grid);
}

ScalarField forcing_field(const Grid& grid, double amplitude) {
    return ScalarField::sample(grid, [amplitude](double x, double y) {
        return amplitude * (std::cos(8.0 * kPi * y) + std::sin(8.0 * kPi * x));
    });
}

ScalarField initial_condition(const Grid& grid) {
    if (grid.n() < 32)
        throw DimensionError("initial condition needs n >= 32 to resolve its k=5 mode");
    return ScalarField::sample(grid, [](double x, double y) {
        return std::sin(8 * kPi * x) * std::sin(8 * kPi * y) +
               0.4 * std::cos(6 * kPi * x) * std::cos(6 * kPi * y) +
               0.3 * std::cos(10 * kPi * x) * std::cos(4 * kPi * y) + 0.02 * std::sin(2 * kPi * y) +
               0.02 * std::sin(2 * kPi * x);
    });
}

// ---------------------------------------------------------------------------
// Trajectory

Trajectory::Trajectory(Grid grid, double dt, std::uint64_t seed, NoiseModel noise)
    : grid_(grid), dt_(dt), seed_(seed), noise_(std::move(noise)) {}

void Trajectory::append(double t, ScalarField omega) {
    require_same_grid(grid_, omega.grid(), "trajectory snapshot");
    if (!times_.empty() && !(t > times_.back()))
        throw std::invalid_argument("trajectory times must be strictly increasing");
    times_.push_back(t);
    snapshots_.push_back(std::move(omega));
}

// ---------------------------------------------------------------------------
// Stepper

struct SaltStepper::Impl {
    SimParams params;
    Grid grid;
    VectorField xi;
    FftWorkspace fft;
    bool has_noise;
    double xi_max;

    // 2 pi k per FFT row / half-spectrum column with Nyquist set to zero, and
    // 1 / (4 pi^2 |k|^2) with the mean mode dropped.
    std::vector<double> dx, dy;
    std::vector<double> inv_lap;
    SpectralField forcing_hat;

    SpectralField work, incr, stage1, stage2;
    std::vector<double> g1, g2, u1, u2, prod;
    double courant = 0.0;

    Impl(const SimParams& p, VectorField x)
        : params(p),
          grid(p.grid),
          xi(std::move(x)),
          fft(p.grid),
          has_noise(max_abs(xi) > 0.0),
          xi_max(max_abs(xi)),
          dx(grid.n()),
          dy(grid.spectral_cols()),
          inv_lap(grid.spectral_size()),
          forcing_hat(to_spectral(forcing_field(p.grid, p.forcing_amplitude))),
          work(grid),
          incr(grid),
          stage1(grid),
          stage2(grid),
          g1(grid.size()),
          g2(grid.size()),
          u1(grid.size()),
          u2(grid.size()),
          prod(grid.size()) {
        require_same_grid(grid, xi.grid(), "noise field");
        const int half = grid.n() / 2;
        for (int i = 0; i < grid.n(); ++i) dx[i] = i == half ? 0.0 : kTwoPi * grid.wavenumber(i);
        for (int j = 0; j < grid.spectral_cols(); ++j) dy[j] = j == half ? 0.0 : kTwoPi * j;
        for (int i = 0; i < grid.n(); ++i) {
            const double k1 = grid.wavenumber(i);
            for (int j = 0; j < grid.spectral_cols(); ++j) {
                const double k_sq = k1 * k1 + double(j) * j;
                inv_lap[flat(i, j)] = k_sq == 0.0 ? 0.0 : 1.0 / (kTwoPi * kTwoPi * k_sq);
            }
        }
    }

    std::size_t flat(int i, int j) const {
        return static_cast<std::size_t>(i) * grid.spectral_cols() + j;
    }

    // work <- i (a dx + b dy) * scale * w, then inverse transform into out.
    void derivative_to_physical(const SpectralField& w, double a, double b, bool through_psi,
                                std::vector<double>& out) {
        using C = SpectralField::Complex;
        for (int i = 0; i < grid.n(); ++i)
            for (int j = 0; j < grid.spectral_cols(); ++j) {
                const std::size_t q = flat(i, j);
                const double scale = through_psi ? inv_lap[q] : 1.0;
                work.coeffs()[q] = w.coeffs()[q] * C(0.0, (a * dx[i] + b * dy[j]) * scale);
            }
        fft.inverse(work.coeffs(), out);
    }

    void gradient(const SpectralField& w) {
        derivative_to_physical(w, 1.0, 0.0, false, g1);
        derivative_to_physical(w, 0.0, 1.0, false, g2);
    }

    // u = grad_perp psi = (d2 psi, -d1 psi)
    void velocity(const SpectralField& w) {
        derivative_to_physical(w, 0.0, 1.0, true, u1);
        derivative_to_physical(w, -1.0, 0.0, true, u2);
    }

    // out <- P(prod)
    void project_product(SpectralField& out) {
        fft.forward(prod, out.coeffs());
        dealias(out);
    }

    // out <- P(-adv_scale u.grad w - noise_scale xi.grad w) + lin_scale (Q - r w)
    void combined(const SpectralField& w, double adv_scale, double noise_scale, double lin_scale,
                  SpectralField& out) {
        gradient(w);
        std::fill(prod.begin(), prod.end(), 0.0);
        if (params.advection && adv_scale != 0.0) {
            velocity(w);
            double umax = 0.0;
            for (std::size_t q = 0; q < prod.size(); ++q) {
                prod[q] -= adv_scale * (u1[q] * g1[q] + u2[q] * g2[q]);
                umax = std::max(umax, std::hypot(u1[q], u2[q]));
            }
            courant = std::max(courant, umax * params.dt / grid.spacing());
        }
        if (has_noise && noise_scale != 0.0) {
            const auto x1 = xi.first.values();
            const auto x2 = xi.second.values();
            for (std::size_t q = 0; q < prod.size(); ++q)
                prod[q] -= noise_scale * (x1[q] * g1[q] + x2[q] * g2[q]);
        }
        project_product(out);
        const double r = params.damping;
        auto o = out.coeffs();
        const auto wc = w.coeffs();
        const auto qc = forcing_hat.coeffs();
        for (std::size_t q = 0; q < o.size(); ++q) o[q] += lin_scale * (qc[q] - r * wc[q]);
    }

    // out <- P(xi.grad w)
    void transport(const SpectralField& w, SpectralField& out) {
        gradient(w);
        const auto x1 = xi.first.values();
        const auto x2 = xi.second.values();
        for (std::size_t q = 0; q < prod.size(); ++q) prod[q] = x1[q] * g1[q] + x2[q] * g2[q];
        project_product(out);
    }

    void ssprk3(SpectralField& w, double dw) {
        const double dt = params.dt;
        auto wc = w.coeffs();
        auto s1 = stage1.coeffs();
        auto s2 = stage2.coeffs();
        auto f = incr.coeffs();

        combined(w, dt, dw, dt, incr);
        for (std::size_t q = 0; q < wc.size(); ++q) s1[q] = wc[q] + f[q];

        combined(stage1, dt, dw, dt, incr);
        for (std::size_t q = 0; q < wc.size(); ++q) s2[q] = 0.75 * wc[q] + 0.25 * (s1[q] + f[q]);

        combined(stage2, dt, dw, dt, incr);
        for (std::size_t q = 0; q < wc.size(); ++q)
            wc[q] = wc[q] / 3.0 + 2.0 / 3.0 * (s2[q] + f[q]);
    }

    void ito_euler(SpectralField& w, double dw) {
        const double dt = params.dt;
        // incr <- dt (-u.grad w + Q - r w); stage1 <- P(xi.grad w); stage2 <- P(xi.grad stage1)
        combined(w, dt, 0.0, dt, incr);
        if (has_noise) {
            transport(w, stage1);
            transport(stage1, stage2);
        } else {
            stage1 *= 0.0;
            stage2 *= 0.0;
        }
        auto wc = w.coeffs();
        const auto f = incr.coeffs();
        const auto t1 = stage1.coeffs();
        const auto t2 = stage2.coeffs();
        for (std::size_t q = 0; q < wc.size(); ++q)
            wc[q] += f[q] - dw * t1[q] + 0.5 * dt * t2[q];
    }
};

SaltStepper::SaltStepper(const SimParams& params, VectorField xi)
    : impl_(std::make_unique<Impl>(params, std::move(xi))) {}
SaltStepper::~SaltStepper() = default;
SaltStepper::SaltStepper(SaltStepper&&) noexcept = default;
SaltStepper& SaltStepper::operator=(SaltStepper&&) noexcept = default;

const Grid& SaltStepper::grid() const { return impl_->grid; }

SpectralField SaltStepper::project(const ScalarField& omega) const {
    require_same_grid(impl_->grid, omega.grid(), "initial vorticity");
    SpectralField c = to_spectral(omega);
    dealias(c);
    return c;
}

ScalarField SaltStepper::physical(const SpectralField& omega_hat) {
    ScalarField out(impl_->grid);
    impl_->fft.inverse(omega_hat.coeffs(), out.values());
    return out;
}

void SaltStepper::step(SpectralField& omega_hat, double dw) {
    impl_->courant = 0.0;
    if (impl_->params.scheme == NoiseScheme::stratonovich_ssprk3)
        impl_->ssprk3(omega_hat, dw);
    else
        impl_->ito_euler(omega_hat, dw);
    impl_->courant += impl_->xi_max * std::abs(dw) / impl_->grid.spacing();
}

SpectralField SaltStepper::deterministic_rhs(const SpectralField& omega_hat) {
    SpectralField out(impl_->grid);
    impl_->combined(omega_hat, 1.0, 0.0, 1.0, out);
    return out;
}

double SaltStepper::last_courant() const { return impl_->courant; }

ScalarField deterministic_rhs(const ScalarField& omega, const SimParams& params) {
    SaltStepper stepper(params, VectorField(params.grid));
    return stepper.physical(stepper.deterministic_rhs(stepper.project(omega)));
}

ScalarField ssprk3_step(const ScalarField& omega, const SimParams& params, const VectorField& xi,
                        double dw) {
    SimParams p = params;
    p.scheme = NoiseScheme::stratonovich_ssprk3;
    SaltStepper stepper(p, xi);
    SpectralField w = stepper.project(omega);
    stepper.step(w, dw);
    if (!all_finite(w)) throw BlowUpError("non-finite vorticity after one step");
    return stepper.physical(w);
}

// ---------------------------------------------------------------------------
// Drivers

void run(const ScalarField& omega0, const SimParams& params, const VectorField& xi,
         const BrownianPath& path, const SnapshotObserver& observer) {
    params.validate();
    const std::size_t steps = params.steps();
    if (path.size() != steps)
        throw std::invalid_argument("Brownian path has " + std::to_string(path.size()) +
                                    " increments, run needs " + std::to_string(steps));
    SaltStepper stepper(params, xi);
    SpectralField w = stepper.project(omega0);
    observer(0, 0.0, stepper.physical(w));

    bool warned = false;
    for (std::size_t s = 1; s <= steps; ++s) {
        stepper.step(w, path[s - 1]);
        if (!all_finite(w)) {
            std::ostringstream msg;
            msg << "non-finite vorticity at step " << s << " (t=" << s * params.dt
                << ", last Courant number " << stepper.last_courant() << ")";
            throw BlowUpError(msg.str());
        }
        if (!warned && stepper.last_courant() > params.cfl_warning) {
            std::cerr << "warning: Courant number " << stepper.last_courant() << " at step " << s
                      << " exceeds " << params.cfl_warning << "\n";
            warned = true;
        }
        if (s % params.snapshot_stride == 0)
            observer(s, static_cast<double>(s) * params.dt, stepper.physical(w));
    }
}

Trajectory simulate(const ScalarField& omega0, const SimParams& params, const VectorField& xi,
                    const BrownianPath& path) {
    Trajectory traj(params.grid, params.dt, path.seed(), params.noise);
    run(omega0, params, xi, path, [&traj](std::size_t, double t, const ScalarField& w) {
        traj.append(t, w);
    });
    return traj;
}

Trajectory simulate(const ScalarField& omega0, const SimParams& params) {
    const std::size_t steps = params.steps();
    const BrownianPath path = steps == 0 ? BrownianPath(params.dt, {}, params.seed)
                                         : brownian_increments(steps, params.dt, params.seed);
    return simulate(omega0, params, build_xi(params.noise, params.grid), path);
}

SpinUpResult spin_up(const SimParams& params, const SpinUpParams& spin) {
    const ScalarField omega0 = initial_condition(params.grid);
    const double e0 = kinetic_energy(omega0);
    SpinUpResult result{omega0, {0.0}, {e0}};
    if (spin.duration == 0.0) return result;

    SimParams p = params;
    p.dt = spin.dt;
    p.t_end = spin.duration;
    p.snapshot_stride = 1;
    std::vector<NoiseMode> modes = params.noise.modes();
    for (auto& m : modes) m.alpha = spin.alpha;
    p.noise = NoiseModel(std::move(modes));

    const std::size_t steps = p.steps();
    const BrownianPath path = brownian_increments(steps, p.dt, params.seed ^ kSpinUpSeedMix);
    const double ceiling = spin.blowup_factor * e0;
    run(omega0, p, build_xi(p.noise, p.grid), path,
        [&](std::size_t step, double t, const ScalarField& w) {
            if (step == 0) return;
            const double e = kinetic_energy(w);
            if (!(e > 0.0 && e < ceiling)) {
                std::ostringstream msg;
                msg << "spin-up energy " << e << " left (0, " << ceiling << ") at t=" << t;
                throw BlowUpError(msg.str());
            }
            result.times.push_back(t);
            result.energies.push_back(e);
            if (step == steps) result.state = w;
        });
    return result;
}

}  // namespace salt
