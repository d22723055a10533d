#include "salt/noise.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "salt/field_ops.hpp"
#include "salt/spectral.hpp"

namespace salt {

void require_resolvable(WaveVector k, const Grid& grid) {
    if (k.is_zero()) throw DimensionError("zero wavevector is not a valid noise mode");
    const int half = grid.n() / 2;
    if (std::abs(k.k1) >= half || std::abs(k.k2) >= half)
        throw DimensionError("wavevector (" + std::to_string(k.k1) + "," + std::to_string(k.k2) +
                             ") is not resolvable on a " + std::to_string(grid.n()) + " grid");
}

NoiseModel::NoiseModel(std::vector<NoiseMode> modes) : modes_(std::move(modes)) {
    for (const auto& m : modes_)
        if (m.k.is_zero()) throw DimensionError("zero wavevector is not a valid noise mode");
}

ScalarField NoiseModel::stream(const Grid& grid) const {
    ScalarField zeta(grid);
    for (const auto& m : modes_) zeta += m.alpha * basis_stream(m.k, grid);
    return zeta;
}

NoiseModel NoiseModel::scaled(double factor) const {
    auto modes = modes_;
    for (auto& m : modes) m.alpha *= factor;
    return NoiseModel(std::move(modes));
}

ScalarField basis_stream(WaveVector k, const Grid& grid) {
    require_resolvable(k, grid);
    return ScalarField::sample(grid, [k](double x, double y) {
        return std::cos(2.0 * std::numbers::pi * (k.k1 * x + k.k2 * y));
    });
}

ScalarField sine_profile(WaveVector k, const Grid& grid) {
    require_resolvable(k, grid);
    return ScalarField::sample(grid, [k](double x, double y) {
        const double s = std::sin(2.0 * std::numbers::pi * (k.k1 * x + k.k2 * y));
        return s * s;
    });
}

VectorField build_xi(const NoiseModel& model, const Grid& grid) {
    if (model.empty()) return VectorField(grid);
    return perp_gradient(model.stream(grid));
}

ScalarField xi_transport(const VectorField& xi, const ScalarField& omega) {
    return advection(xi, omega);
}

ScalarField double_transport(const VectorField& xi, const ScalarField& omega) {
    return advection(xi, advection(xi, omega));
}

BrownianPath::BrownianPath(double dt, std::vector<double> increments, std::uint64_t seed)
    : dt_(dt), increments_(std::move(increments)), seed_(seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("Brownian path needs dt > 0");
}

double BrownianPath::quadratic_variation() const {
    double sum = 0.0;
    for (double dw : increments_) sum += dw * dw;
    return sum;
}

double BrownianPath::terminal_value() const {
    double w = 0.0;
    for (double dw : increments_) w += dw;
    return w;
}

BrownianPath BrownianPath::negated() const {
    auto flipped = increments_;
    for (double& dw : flipped) dw = -dw;
    return BrownianPath(dt_, std::move(flipped), seed_);
}

BrownianPath brownian_increments(std::size_t n_steps, double dt, std::uint64_t seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("brownian_increments: dt must be positive");
    if (n_steps == 0) throw std::invalid_argument("brownian_increments: need at least one step");
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    std::vector<double> increments(n_steps);
    for (double& dw : increments) dw = normal(engine);
    return BrownianPath(dt, std::move(increments), seed);
}

}  // namespace salt
