#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "salt/field.hpp"
#include "salt/field_ops.hpp"

namespace salt::testing {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Random trigonometric polynomial with |k1|,|k2| <= kmax, built directly in
/// physical space. Band-limited inside the 2/3 band for kmax <= n/3, so every
/// spectral identity holds to roundoff.
inline ScalarField random_field(const Grid& grid, std::uint64_t seed, int kmax = 6, double offset = 0.3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ScalarField f(grid);
    for (int k1 = 0; k1 <= kmax; ++k1)
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (k1 == 0 && k2 <= 0) continue;
            const double a = gauss(rng) / (1.0 + k1 * k1 + k2 * k2);
            const double b = gauss(rng) / (1.0 + k1 * k1 + k2 * k2);
            for (int i = 0; i < grid.n(); ++i)
                for (int j = 0; j < grid.n(); ++j) {
                    const double ph = kTwoPi * (k1 * grid.x(i) + k2 * grid.y(j));
                    f(i, j) += a * std::cos(ph) + b * std::sin(ph);
                }
        }
    for (double& v : f.values()) v += offset;
    return f;
}

inline double max_diff(const ScalarField& a, const ScalarField& b) { return max_abs(a - b); }

inline double max_diff(const VectorField& a, const VectorField& b) {
    return std::max(max_abs(a.first - b.first), max_abs(a.second - b.second));
}

}  // namespace salt::testing
