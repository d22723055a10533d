#include "salt/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "salt/spectral.hpp"

namespace salt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wavenumber used for differentiation: the Nyquist row/column has no real
// derivative, so it maps to zero.
int derivative_wavenumber(const Grid& g, int index) {
    return index == g.n() / 2 ? 0 : g.wavenumber(index);
}

// Multiplies coefficients by i 2 pi (a k1 + b k2).
SpectralField directional_derivative(const SpectralField& c, double a, double b) {
    const Grid& g = c.grid();
    SpectralField out(g);
    for (int i = 0; i < g.n(); ++i) {
        const double k1 = derivative_wavenumber(g, i);
        for (int j = 0; j < g.spectral_cols(); ++j) {
            const double k2 = derivative_wavenumber(g, j);
            out(i, j) = c(i, j) * SpectralField::Complex(0.0, kTwoPi * (a * k1 + b * k2));
        }
    }
    return out;
}

SpectralField inverse_laplacian_coeffs(const SpectralField& c) {
    const Grid& g = c.grid();
    SpectralField out(g);
    for (int i = 0; i < g.n(); ++i) {
        const double k1 = g.wavenumber(i);
        for (int j = 0; j < g.spectral_cols(); ++j) {
            const double k2 = j;
            const double k_sq = k1 * k1 + k2 * k2;
            out(i, j) = k_sq == 0.0 ? 0.0 : c(i, j) / (kTwoPi * kTwoPi * k_sq);
        }
    }
    return out;
}

}  // namespace

VectorField gradient(const ScalarField& f) {
    const SpectralField c = to_spectral(f);
    return {to_physical(directional_derivative(c, 1.0, 0.0)),
            to_physical(directional_derivative(c, 0.0, 1.0))};
}

VectorField perp_gradient(const ScalarField& f) {
    const SpectralField c = to_spectral(f);
    return {to_physical(directional_derivative(c, 0.0, 1.0)),
            to_physical(directional_derivative(c, -1.0, 0.0))};
}

ScalarField divergence(const VectorField& u) {
    SpectralField d = directional_derivative(to_spectral(u.first), 1.0, 0.0);
    d += directional_derivative(to_spectral(u.second), 0.0, 1.0);
    return to_physical(d);
}

ScalarField curl(const VectorField& u) {
    SpectralField d = directional_derivative(to_spectral(u.second), 1.0, 0.0);
    d += directional_derivative(to_spectral(u.first), 0.0, -1.0);
    return to_physical(d);
}

ScalarField laplacian(const ScalarField& f) {
    const Grid& g = f.grid();
    SpectralField c = to_spectral(f);
    for (int i = 0; i < g.n(); ++i) {
        const double k1 = g.wavenumber(i);
        for (int j = 0; j < g.spectral_cols(); ++j)
            c(i, j) *= -kTwoPi * kTwoPi * (k1 * k1 + double(j) * j);
    }
    return to_physical(c);
}

ScalarField invert_laplacian(const ScalarField& f) {
    return to_physical(inverse_laplacian_coeffs(to_spectral(f)));
}

VectorField biot_savart(const ScalarField& omega) {
    const SpectralField psi = inverse_laplacian_coeffs(to_spectral(omega));
    return {to_physical(directional_derivative(psi, 0.0, 1.0)),
            to_physical(directional_derivative(psi, -1.0, 0.0))};
}

ScalarField advection(const VectorField& u, const ScalarField& omega) {
    require_same_grid(u.grid(), omega.grid(), "advection");
    const VectorField grad = gradient(omega);
    ScalarField product = hadamard(u.first, grad.first);
    product += hadamard(u.second, grad.second);
    return dealiased(product);
}

double kinetic_energy(const ScalarField& omega) {
    const VectorField u = biot_savart(omega);
    const double norm = l2_norm(u);
    return 0.5 * norm * norm;
}

double inner(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f.grid(), g.grid(), "inner product");
    const auto fv = f.values();
    const auto gv = g.values();
    double sum = 0.0;
    for (std::size_t q = 0; q < fv.size(); ++q) sum += fv[q] * gv[q];
    const double h = f.grid().spacing();
    return h * h * sum;
}

double inner(const VectorField& u, const VectorField& v) {
    return inner(u.first, v.first) + inner(u.second, v.second);
}

double l2_norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }

double l2_norm(const VectorField& u) {
    return std::sqrt(inner(u.first, u.first) + inner(u.second, u.second));
}

double mean(const ScalarField& f) {
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    return sum / static_cast<double>(f.grid().size());
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double max_abs(const VectorField& u) {
    double m = 0.0;
    const auto a = u.first.values();
    const auto b = u.second.values();
    for (std::size_t q = 0; q < a.size(); ++q) m = std::max(m, std::hypot(a[q], b[q]));
    return m;
}

double sobolev_norm(const ScalarField& f, int order) {
    if (order < 0) throw std::invalid_argument("sobolev_norm: negative order");
    const Grid& g = f.grid();
    const SpectralField c = to_spectral(f);
    double sum = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const double k1 = g.wavenumber(i);
        for (int j = 0; j < g.spectral_cols(); ++j) {
            // Columns 1..n/2-1 stand for both +k2 and -k2.
            const double multiplicity = (j == 0 || j == g.n() / 2) ? 1.0 : 2.0;
            const double weight = std::pow(1.0 + kTwoPi * kTwoPi * (k1 * k1 + double(j) * j), order);
            sum += multiplicity * weight * std::norm(c(i, j));
        }
    }
    return std::sqrt(sum);
}

}  // namespace salt
