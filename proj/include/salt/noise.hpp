#pragma once

#include <cstdint>
#include <vector>

#include "salt/field.hpp"

namespace salt {

struct WaveVector {
    int k1 = 0;
    int k2 = 0;

    /// k_perp = (k2, -k1).
    WaveVector perp() const { return {k2, -k1}; }
    bool is_zero() const { return k1 == 0 && k2 == 0; }
    bool operator==(const WaveVector&) const = default;
};

/// Throws DimensionError for k = 0 or max(|k1|, |k2|) >= n/2.
void require_resolvable(WaveVector k, const Grid& grid);

struct NoiseMode {
    WaveVector k;
    double alpha = 0.0;
    bool operator==(const NoiseMode&) const = default;
};

/// Transport noise xi = grad_perp zeta with zeta = sum_j alpha_j cos(2 pi k_j . x).
///
/// Basis functions are unit-amplitude cosines, so a single mode with
/// amplitude alpha has |xi| peaking at 2 pi alpha |k|.
class NoiseModel {
public:
    NoiseModel() = default;
    explicit NoiseModel(std::vector<NoiseMode> modes);

    static NoiseModel single(WaveVector k, double alpha) { return NoiseModel({{k, alpha}}); }

    const std::vector<NoiseMode>& modes() const { return modes_; }
    bool empty() const { return modes_.empty(); }

    ScalarField stream(const Grid& grid) const;
    NoiseModel scaled(double factor) const;

    bool operator==(const NoiseModel&) const = default;

private:
    std::vector<NoiseMode> modes_;
};

/// cos(2 pi k . x) on the grid.
ScalarField basis_stream(WaveVector k, const Grid& grid);

/// sin^2(2 pi k . x), the spatial weight that single-mode transport noise
/// puts on (k_perp . grad omega)^2.
ScalarField sine_profile(WaveVector k, const Grid& grid);

/// Noise vector field of the model; zero for an empty model.
VectorField build_xi(const NoiseModel& model, const Grid& grid);

/// Dealiased xi . grad(omega).
ScalarField xi_transport(const VectorField& xi, const ScalarField& omega);

/// xi . grad(xi . grad(omega)), dealiased after each product.
ScalarField double_transport(const VectorField& xi, const ScalarField& omega);

/// Seeded Brownian increments on a uniform time partition.
class BrownianPath {
public:
    BrownianPath(double dt, std::vector<double> increments, std::uint64_t seed);

    double dt() const { return dt_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<double>& increments() const { return increments_; }
    std::size_t size() const { return increments_.size(); }
    double operator[](std::size_t i) const { return increments_[i]; }

    /// sum of squared increments
    double quadratic_variation() const;
    /// W at the end of the path.
    double terminal_value() const;
    /// Same path with W -> -W.
    BrownianPath negated() const;

private:
    double dt_;
    std::vector<double> increments_;
    std::uint64_t seed_;
};

/// n_steps i.i.d. Normal(0, dt) draws from mt19937_64 seeded with `seed`.
/// Throws std::invalid_argument for dt <= 0 or n_steps == 0.
BrownianPath brownian_increments(std::size_t n_steps, double dt, std::uint64_t seed);

}  // namespace salt
