#include "salt/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <string>

namespace salt {

// ---------------------------------------------------------------------------
// Grid and field containers

Grid::Grid(int n) : n_(n) {
    if (n < 8 || n % 2 != 0)
        throw DimensionError("grid size must be even and >= 8, got " + std::to_string(n));
}

ScalarField::ScalarField(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw DimensionError("field has " + std::to_string(values_.size()) + " values, grid needs " +
                             std::to_string(grid_.size()));
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "field addition");
    for (std::size_t q = 0; q < values_.size(); ++q) values_[q] += other.values_[q];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "field subtraction");
    for (std::size_t q = 0; q < values_.size(); ++q) values_[q] -= other.values_[q];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "pointwise product");
    ScalarField out(a.grid());
    auto av = a.values();
    auto bv = b.values();
    auto ov = out.values();
    for (std::size_t q = 0; q < ov.size(); ++q) ov[q] = av[q] * bv[q];
    return out;
}

VectorField::VectorField(ScalarField a, ScalarField b) : first(std::move(a)), second(std::move(b)) {
    require_same_grid(first.grid(), second.grid(), "vector field components");
}

VectorField& VectorField::operator+=(const VectorField& other) {
    first += other.first;
    second += other.second;
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    first *= s;
    second *= s;
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) {
    a.first -= b.first;
    a.second -= b.second;
    return a;
}
VectorField operator*(double s, VectorField a) { return a *= s; }

SpectralField::SpectralField(Grid grid) : grid_(grid), coeffs_(grid.spectral_size()) {}

SpectralField::Complex SpectralField::at(int k1, int k2) const {
    const int n = grid_.n();
    auto row = [n](int k) { return ((k % n) + n) % n; };
    if (k2 >= 0) return (*this)(row(k1), k2);
    return std::conj((*this)(row(-k1), -k2));
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    require_same_grid(grid_, other.grid_, "spectral addition");
    for (std::size_t q = 0; q < coeffs_.size(); ++q) coeffs_[q] += other.coeffs_[q];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b))
        throw DimensionError(std::string(what) + ": grid mismatch (" + std::to_string(a.n()) +
                             " vs " + std::to_string(b.n()) + ")");
}

// ---------------------------------------------------------------------------
// FFTW plans

namespace detail {

struct FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    explicit FftPlans(int n) {
        // Plans are built on throwaway buffers and always run through the
        // new-array interface, hence FFTW_UNALIGNED.
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        std::vector<double> real(static_cast<std::size_t>(n) * n);
        std::vector<fftw_complex> cplx(static_cast<std::size_t>(n) * (n / 2 + 1));
        forward = fftw_plan_dft_r2c_2d(n, n, real.data(), cplx.data(), flags);
        inverse = fftw_plan_dft_c2r_2d(n, n, cplx.data(), real.data(), flags);
    }

    ~FftPlans() {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(inverse);
    }
};

namespace {

std::shared_ptr<const FftPlans> plans_for(int n) {
    // FFTW's planner is not thread-safe; execution with distinct arrays is.
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const FftPlans>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const FftPlans>(n);
    return slot;
}

}  // namespace
}  // namespace detail

FftWorkspace::FftWorkspace(Grid grid)
    : grid_(grid), plans_(detail::plans_for(grid.n())), scratch_(grid.spectral_size()) {}

void FftWorkspace::forward(std::span<const double> in, std::span<SpectralField::Complex> out) {
    if (in.size() != grid_.size() || out.size() != grid_.spectral_size())
        throw DimensionError("forward transform: buffer size mismatch");
    // r2c out-of-place leaves the input untouched.
    fftw_execute_dft_r2c(plans_->forward, const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (auto& c : out) c *= scale;
}

void FftWorkspace::inverse(std::span<const SpectralField::Complex> in, std::span<double> out) {
    if (in.size() != grid_.spectral_size() || out.size() != grid_.size())
        throw DimensionError("inverse transform: buffer size mismatch");
    // c2r overwrites its input.
    std::copy(in.begin(), in.end(), scratch_.begin());
    fftw_execute_dft_c2r(plans_->inverse, reinterpret_cast<fftw_complex*>(scratch_.data()),
                         out.data());
}

SpectralField to_spectral(const ScalarField& f) {
    SpectralField out(f.grid());
    FftWorkspace ws(f.grid());
    ws.forward(f.values(), out.coeffs());
    return out;
}

ScalarField to_physical(const SpectralField& c) {
    ScalarField out(c.grid());
    FftWorkspace ws(c.grid());
    ws.inverse(c.coeffs(), out.values());
    return out;
}

ScalarField field_from_array(int rows, int cols, std::vector<double> values) {
    if (rows != cols)
        throw DimensionError("field must be square, got " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    if (values.size() != static_cast<std::size_t>(rows) * cols)
        throw DimensionError("array size does not match its shape");
    return ScalarField(Grid(rows), std::move(values));
}

void dealias(SpectralField& c) {
    const Grid& g = c.grid();
    const int cutoff = g.dealias_cutoff();
    for (int i = 0; i < g.n(); ++i) {
        const bool row_cut = std::abs(g.wavenumber(i)) > cutoff;
        for (int j = 0; j < g.spectral_cols(); ++j)
            if (row_cut || j > cutoff) c(i, j) = 0.0;
    }
}

ScalarField dealiased(const ScalarField& f) {
    SpectralField c = to_spectral(f);
    dealias(c);
    return to_physical(c);
}

}  // namespace salt
