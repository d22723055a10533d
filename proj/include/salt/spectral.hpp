#pragma once

#include <memory>
#include <span>
#include <vector>

#include "salt/field.hpp"

namespace salt {

namespace detail {
struct FftPlans;
}

/// Real-to-complex 2D transforms for one grid size.
///
/// Plans are created once per n with FFTW_ESTIMATE (deterministic algorithm
/// choice, so repeated runs are bit-identical) and shared between workspaces.
/// A workspace owns its scratch buffer and must not be used from two threads
/// at once; distinct workspaces may run concurrently.
class FftWorkspace {
public:
    explicit FftWorkspace(Grid grid);

    const Grid& grid() const { return grid_; }

    /// Physical values -> normalized half spectrum.
    void forward(std::span<const double> in, std::span<SpectralField::Complex> out);
    /// Normalized half spectrum -> physical values. Input is not modified.
    void inverse(std::span<const SpectralField::Complex> in, std::span<double> out);

private:
    Grid grid_;
    std::shared_ptr<const detail::FftPlans> plans_;
    std::vector<SpectralField::Complex> scratch_;
};

SpectralField to_spectral(const ScalarField& f);
ScalarField to_physical(const SpectralField& c);

/// Builds a field from a rows x cols row-major array; throws DimensionError
/// for non-square or odd-sized input.
ScalarField field_from_array(int rows, int cols, std::vector<double> values);

/// Zeroes every coefficient with |k1| or |k2| above the 2/3 cutoff.
void dealias(SpectralField& c);
ScalarField dealiased(const ScalarField& f);

}  // namespace salt
