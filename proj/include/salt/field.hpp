#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "salt/errors.hpp"

namespace salt {

/// Square doubly periodic grid on the unit torus [0,1)^2 with n cells per axis.
///
/// Point (i, j) sits at (x, y) = (i h, j h) and is stored at flat index
/// i * n + j, so x is the slow (row) index.
class Grid {
public:
    /// Throws DimensionError unless n is even and at least 8.
    explicit Grid(int n);

    int n() const { return n_; }
    double spacing() const { return 1.0 / n_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }
    double x(int i) const { return i * spacing(); }
    double y(int j) const { return j * spacing(); }

    /// Number of stored half-spectrum columns (n/2 + 1).
    int spectral_cols() const { return n_ / 2 + 1; }
    std::size_t spectral_size() const { return static_cast<std::size_t>(n_) * spectral_cols(); }

    /// Signed wavenumber for FFT row index i, in [-n/2, n/2).
    int wavenumber(int i) const { return i < n_ / 2 ? i : i - n_; }

    /// Largest retained |k| component under the 2/3 rule (3 K < n).
    int dealias_cutoff() const { return (n_ - 1) / 3; }

    bool operator==(const Grid&) const = default;

private:
    int n_;
};

/// Real periodic grid function in physical space.
class ScalarField {
public:
    explicit ScalarField(Grid grid);
    ScalarField(Grid grid, std::vector<double> values);

    /// Samples f(x, y) at every grid point.
    template <class F>
    static ScalarField sample(Grid grid, F&& f) {
        ScalarField out(grid);
        for (int i = 0; i < grid.n(); ++i)
            for (int j = 0; j < grid.n(); ++j) out(i, j) = f(grid.x(i), grid.y(j));
        return out;
    }

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
    double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

    bool operator==(const ScalarField&) const = default;

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// Pair of scalar components (u1, u2) on one grid.
struct VectorField {
    ScalarField first;
    ScalarField second;

    explicit VectorField(Grid grid) : first(grid), second(grid) {}
    VectorField(ScalarField a, ScalarField b);

    const Grid& grid() const { return first.grid(); }

    VectorField& operator+=(const VectorField& other);
    VectorField& operator*=(double s);
    bool operator==(const VectorField&) const = default;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

/// Half-spectrum Fourier coefficients of a real field.
///
/// Normalization: c(k) = n^-2 sum_x f(x) exp(-2 pi i k.x), so a constant field
/// 1 has c(0,0) = 1 and cos(2 pi x) has c(+-1,0) = 1/2. Storage is row i
/// (x wavenumber, all n rows) by column j in [0, n/2] (y wavenumber >= 0);
/// negative y wavenumbers follow from conjugate symmetry.
class SpectralField {
public:
    using Complex = std::complex<double>;

    explicit SpectralField(Grid grid);

    const Grid& grid() const { return grid_; }
    std::span<const Complex> coeffs() const { return coeffs_; }
    std::span<Complex> coeffs() { return coeffs_; }

    Complex operator()(int i, int j) const { return coeffs_[flat(i, j)]; }
    Complex& operator()(int i, int j) { return coeffs_[flat(i, j)]; }

    /// Coefficient for a signed wavevector (k1, k2); uses conjugate symmetry
    /// when k2 < 0.
    Complex at(int k1, int k2) const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator*=(double s);

private:
    std::size_t flat(int i, int j) const {
        return static_cast<std::size_t>(i) * grid_.spectral_cols() + j;
    }

    Grid grid_;
    std::vector<Complex> coeffs_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace salt
