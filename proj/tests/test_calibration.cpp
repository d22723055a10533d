#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "salt/calibration.hpp"
#include "salt/errors.hpp"
#include "salt/field_ops.hpp"
#include "test_support.hpp"

using namespace salt;
using salt::testing::kPi;
using salt::testing::kTwoPi;
using salt::testing::max_diff;
using salt::testing::random_field;

namespace {

const Grid g64{64};
const WaveVector k24{2, 4};

Trajectory frozen(const ScalarField& w, std::size_t count, double dt) {
    Trajectory t(w.grid(), dt, 0, NoiseModel{});
    for (std::size_t s = 0; s < count; ++s) t.append(s * dt, w);
    return t;
}

// Short run of the reference model from the analytic initial state.
Trajectory short_run(double alpha, double dt, double t_end, bool advect = true, std::uint64_t seed = 20210125) {
    SimParams p;
    p.dt = dt;
    p.t_end = t_end;
    p.noise = NoiseModel::single(k24, alpha);
    p.advection = advect;
    p.seed = seed;
    return simulate(initial_condition(g64), p);
}

double pearson(const ScalarField& a, const ScalarField& b) {
    const double ma = mean(a), mb = mean(b);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t q = 0; q < a.values().size(); ++q) {
        const double da = a.values()[q] - ma, db = b.values()[q] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    return sab / std::sqrt(saa * sbb);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST(EnergyQv, ConstantTrajectoryIsZero) {
    EXPECT_EQ(energy_qv(frozen(initial_condition(g64), 20, 0.1)), 0.0);
    EXPECT_THROW(energy_qv(frozen(initial_condition(g64), 1, 0.1)), std::invalid_argument);
}

TEST(EnergyQv, ScaledBrownianEnergy) {
    // Snapshots a_i sin(2 pi x) have energy a_i^2 / (16 pi^2); choose a_i so
    // that e_i = e0 + sigma W_i.
    const std::size_t n = 10000;
    const double dt = 1.0 / n, sigma = 0.3, e0 = 5.0;
    const BrownianPath path = brownian_increments(n, dt, 20210125);
    const ScalarField mode = ScalarField::sample(g64, [](double x, double) { return std::sin(kTwoPi * x); });
    Trajectory traj(g64, dt, 0, NoiseModel{});
    double w = 0.0;
    for (std::size_t s = 0; s <= n; ++s) {
        if (s > 0) w += path[s - 1];
        traj.append(s * dt, std::sqrt(16 * kPi * kPi * (e0 + sigma * w)) * mode);
    }
    const double expected = sigma * sigma * 1.0;
    EXPECT_LE(std::abs(energy_qv(traj) - expected) / expected, 3.0 / std::sqrt(double(n)));
}

TEST(EnergyQv, SmoothPathQvIsFirstOrderInDt) {
    // Sum of (e' dt)^2 over T/dt steps is dt * int e'^2: halving dt halves it.
    SimParams p;
    p.noise = NoiseModel{};
    p.damping = 0.5;
    p.forcing_amplitude = 0.0;
    p.t_end = 0.2;
    std::vector<double> qv;
    for (double dt : {2e-3, 1e-3}) {
        p.dt = dt;
        qv.push_back(energy_qv(simulate(initial_condition(g64), p)));
    }
    EXPECT_NEAR(qv[0] / qv[1], 2.0, 0.02);
}

TEST(VorticityQv, ConstantTrajectoryAndNonNegativity) {
    EXPECT_EQ(max_abs(vorticity_qv(frozen(initial_condition(g64), 5, 0.1)).values), 0.0);
    const QvField qv = vorticity_qv(short_run(0.01, 1e-3, 0.05));
    EXPECT_EQ(qv.samples, 50u);
    EXPECT_NEAR(qv.horizon, 0.05, 1e-15);
    for (double v : qv.values.values()) EXPECT_GE(v, 0.0);
}

TEST(VorticityQv, ProfileFollowsModelPrediction) {
    const double alpha = 0.001;
    const Trajectory traj = short_run(alpha, 5e-6, 0.02);
    const QvField qv = vorticity_qv(traj);
    const ScalarField predicted =
        (4 * kPi * kPi * alpha * alpha) * hadamard(b_field(traj, k24), sine_profile(k24, g64));
    EXPECT_GE(pearson(qv.values, predicted), 0.99);
}

TEST(BField, ConstantSpaceFieldIsZero) {
    ScalarField c(g64);
    for (double& v : c.values()) v = 0.4;
    EXPECT_LT(max_abs(b_field(frozen(c, 5, 0.1), k24)), 1e-20);
}

TEST(BField, FrozenTrajectoryIsExact) {
    const ScalarField w = random_field(g64, 4, 10);
    const Trajectory traj = frozen(w, 11, 0.1);
    const VectorField gw = gradient(w);
    const ScalarField kg = 4.0 * gw.first + (-2.0) * gw.second;
    const ScalarField expected = 1.0 * hadamard(kg, kg);
    EXPECT_LT(max_diff(b_field(traj, k24), expected), 1e-12 * max_abs(expected));
}

TEST(BField, TrapezoidErrorIsSecondOrderInStride) {
    const Trajectory traj = short_run(0.0, 1e-3, 0.4);
    const std::vector<std::size_t> strides{1, 4, 8, 16};
    VorticityEstimator est(g64, k24, strides);
    for (std::size_t s = 0; s < traj.size(); ++s) est.push(traj.times()[s], traj[s]);
    const ScalarField fine = est.b_field(0);
    const double e4 = max_diff(est.b_field(1), fine);
    const double e8 = max_diff(est.b_field(2), fine);
    const double e16 = max_diff(est.b_field(3), fine);
    // Errors relative to stride 1 go like (s^2 - 1).
    EXPECT_NEAR(e8 / e4, 63.0 / 15.0, 0.3);
    EXPECT_NEAR(e16 / e8, 255.0 / 63.0, 0.3);
    EXPECT_THROW(b_field(traj, {0, 0}), DimensionError);
}

TEST(EstimateAlpha, NoNoiseGivesDeterministicFloor) {
    std::vector<double> sq;
    for (double dt : {2e-4, 1e-4}) sq.push_back(estimate_alpha(short_run(0.0, dt, 0.1), k24).alpha_hat_sq);
    EXPECT_LT(std::sqrt(sq[1]), 1e-3);
    EXPECT_NEAR(sq[0] / sq[1], 2.0, 0.05);
}

TEST(EstimateAlpha, RecordsMetadataAndError) {
    const Trajectory traj = short_run(0.001, 5e-6, 0.01);
    const CalibrationResult r = estimate_alpha(traj, k24);
    EXPECT_EQ(r.k, k24);
    EXPECT_EQ(r.samples, 2000u);
    EXPECT_NEAR(r.horizon, 0.01, 1e-15);
    ASSERT_TRUE(r.relative_error.has_value());
    EXPECT_NEAR(*r.relative_error, std::abs(r.alpha_hat - 0.001) / 0.001, 1e-15);
    EXPECT_GE(r.alpha_hat, 0.0);
    EXPECT_NEAR(r.alpha_hat * r.alpha_hat, r.alpha_hat_sq, 1e-18);
    // Loose: statistical error at N = 2000 is about 1.6 %.
    EXPECT_LT(*r.relative_error, 0.1);
}

TEST(EstimateAlpha, ProjectionIsInertForLowModes) {
    // sin(2 pi k.x) k_perp.grad w stays inside the 2/3 band, so both denominators agree.
    const ScalarField a = random_field(g64, 31, 5), b = random_field(g64, 32, 5);
    Trajectory t(g64, 0.1, 0, NoiseModel{});
    for (int s = 0; s <= 10; ++s) t.append(0.1 * s, (1.0 - 0.1 * s) * a + 0.1 * s * b);
    const CalibrationResult r = estimate_alpha(t, k24);
    EXPECT_NEAR(r.resolved_b_mean, r.weighted_b_mean, 1e-12 * r.weighted_b_mean);
    EXPECT_NEAR(r.alpha_hat, r.alpha_hat_unprojected, 1e-12 * r.alpha_hat);
}

TEST(EstimateAlpha, ProjectionRemovesContentNearCutoff) {
    // w has mode (20, 19), inside the band; its product with the (2, 4) sine
    // splits into (22, 23), outside, and (18, 15), inside.
    ScalarField w(g64);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) w(i, j) = std::cos(kTwoPi * (20 * g64.x(i) + 19 * g64.y(j)));
    Trajectory t(g64, 0.1, 0, NoiseModel{});
    for (int s = 0; s <= 4; ++s) t.append(0.1 * s, (1.0 + 0.1 * s) * w);
    const CalibrationResult r = estimate_alpha(t, k24);
    EXPECT_LT(r.resolved_b_mean, 0.9 * r.weighted_b_mean);
    EXPECT_GT(r.resolved_b_mean, 0.0);
    EXPECT_GT(r.alpha_hat, r.alpha_hat_unprojected);
}

TEST(EstimateAlpha, FlowWithoutGradientAlongKPerpIsRejected) {
    // cos(2 pi k.x) is constant along k_perp.
    EXPECT_THROW(estimate_alpha(frozen(basis_stream(k24, g64), 5, 0.1), k24), EstimationError);
}

TEST(EstimateAlpha, SignSymmetry) {
    // alpha enters only through alpha^2. Flipping xi and W together leaves the
    // data unchanged; flipping one of them gives a different but equally
    // likely path, so the estimate only agrees statistically.
    SimParams p;
    p.dt = 1e-4;
    p.t_end = 0.05;
    p.noise = NoiseModel::single(k24, 0.002);
    const ScalarField w0 = initial_condition(g64);
    const BrownianPath path = brownian_increments(p.steps(), p.dt, 5);
    const VectorField xi = build_xi(p.noise, g64);
    const double base = estimate_alpha(simulate(w0, p, xi, path), k24).alpha_hat;
    const double both = estimate_alpha(simulate(w0, p, -1.0 * xi, path.negated()), k24).alpha_hat;
    EXPECT_NEAR(both, base, 1e-12 * base);
    const double flipped_xi = estimate_alpha(simulate(w0, p, -1.0 * xi, path), k24).alpha_hat;
    const double flipped_w = estimate_alpha(simulate(w0, p, xi, path.negated()), k24).alpha_hat;
    EXPECT_EQ(flipped_xi, flipped_w);
    EXPECT_NEAR(flipped_xi, base, 0.05 * base);
    EXPECT_GE(base, 0.0);
}

TEST(Gram, SingleModeMatchesEnergyQv) {
    const double alpha = 0.001;
    const Trajectory traj = short_run(alpha, 5e-6, 0.05);
    const Eigen::MatrixXd a = assemble_gram(traj, {k24});
    ASSERT_EQ(a.rows(), 1);
    const double predicted = alpha * alpha * a(0, 0);
    EXPECT_NEAR(energy_qv(traj) / predicted, 1.0, 0.10);
}

TEST(Gram, SymmetricPsdAndPermutationConsistent) {
    const Trajectory traj = short_run(0.01, 1e-3, 0.1);
    const std::vector<WaveVector> basis{{2, 4}, {1, 3}, {3, -1}, {0, 2}};
    const Eigen::MatrixXd a = assemble_gram(traj, basis);
    EXPECT_LT((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);

    const std::vector<WaveVector> permuted{{0, 2}, {2, 4}, {3, -1}, {1, 3}};
    const std::vector<int> order{3, 0, 2, 1};  // permuted[i] = basis[order[i]]
    const Eigen::MatrixXd b = assemble_gram(traj, permuted);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(b(i, j), a(order[i], order[j]));
}

TEST(DiagonalizeSolve, IdentityOneMode) {
    const EnergyDecomposition d = diagonalize_solve(Eigen::MatrixXd::Identity(1, 1), 2.0);
    ASSERT_TRUE(d.alpha_tilde_sq.has_value());
    EXPECT_DOUBLE_EQ(*d.alpha_tilde_sq, 2.0);
}

TEST(DiagonalizeSolve, ZeroEigenvalueFlagged) {
    Eigen::MatrixXd a(2, 2);
    a << 2, 0, 0, 0;
    const EnergyDecomposition d = diagonalize_solve(a, 1.0);
    ASSERT_EQ(d.identifiable.size(), 2u);
    // Ascending eigenvalues: the zero comes first.
    EXPECT_FALSE(d.identifiable[0]);
    EXPECT_TRUE(d.identifiable[1]);
    EXPECT_FALSE(d.alpha_tilde_sq.has_value());
    EXPECT_THROW(diagonalize_solve(Eigen::MatrixXd::Zero(2, 2), 1.0), EstimationError);
}

TEST(DiagonalizeSolve, ReconstructsRandomSpd) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) m(i, j) = g(rng);
    const Eigen::MatrixXd a = m * m.transpose() + 0.1 * Eigen::MatrixXd::Identity(5, 5);
    const EnergyDecomposition d = diagonalize_solve(a, 1.0);
    const Eigen::MatrixXd back = d.eigenvectors * d.eigenvalues.asDiagonal() * d.eigenvectors.transpose();
    EXPECT_LT((back - a).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((d.eigenvectors.transpose() * d.eigenvectors - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(),
              1e-12);
    // Constraint surface: qv = sum alpha_tilde^2 lambda = alpha^T A alpha.
    Eigen::VectorXd alpha(5);
    alpha << 0.1, -0.2, 0.3, 0.05, 0.0;
    const EnergyDecomposition at = diagonalize_solve(a, alpha.dot(a * alpha));
    EXPECT_NEAR(at.constraint_residual(alpha), 0.0, 1e-12);
}

TEST(DiagonalizeSolve, RejectsAsymmetric) {
    Eigen::MatrixXd a(2, 2);
    a << 1, 0.5, 0.2, 1;
    EXPECT_THROW(diagonalize_solve(a, 1.0), std::invalid_argument);
}

TEST(RelativeError, Examples) {
    EXPECT_EQ(relative_error(0.001, 0.001), 0.0);
    EXPECT_EQ(relative_error(0.0, 0.001), 1.0);
    EXPECT_NEAR(relative_error(0.0009987, 0.001), 0.0013, 1e-12);
    EXPECT_THROW(relative_error(0.1, 0.0), std::invalid_argument);
}

TEST(Convergence, FullLengthRowEqualsDirectEstimate) {
    const Trajectory traj = short_run(0.001, 5e-6, 0.01);
    const auto rows = convergence_study(traj, k24, {traj.size() - 1});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].stride, 1u);
    const CalibrationResult direct = estimate_alpha(traj, k24);
    EXPECT_EQ(rows[0].result.alpha_hat, direct.alpha_hat);
    EXPECT_EQ(rows[0].result.alpha_hat_sq, direct.alpha_hat_sq);
}

TEST(Convergence, StridesAndLimits) {
    EXPECT_EQ(subsampling_stride(200000, 66667), 3u);
    EXPECT_EQ(subsampling_stride(200000, 2500), 80u);
    EXPECT_EQ(subsampling_stride(200000, 200000), 1u);
    EXPECT_THROW(subsampling_stride(100, 101), std::invalid_argument);
    EXPECT_THROW(subsampling_stride(100, 0), std::invalid_argument);
    const Trajectory traj = short_run(0.001, 1e-3, 0.01);
    EXPECT_THROW(convergence_study(traj, k24, {11}), std::invalid_argument);
}

TEST(Convergence, ErrorTrendsDownward) {
    const Trajectory traj = short_run(0.001, 5e-6, 0.05);
    const std::vector<std::size_t> n_list{125, 250, 500, 1000, 2000, 5000, 10000};
    const auto rows = convergence_study(traj, k24, n_list);
    std::vector<double> lower, upper;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ASSERT_TRUE(rows[i].result.relative_error.has_value());
        (i < rows.size() / 2 ? lower : upper).push_back(*rows[i].result.relative_error);
    }
    EXPECT_LE(median(upper), median(lower));
}

TEST(PointwiseRatio, MasksSmallDenominators) {
    ScalarField qv(g64), wb(g64);
    qv(0, 0) = 4 * kPi * kPi * 2.0;
    wb(0, 0) = 1.0;
    const ScalarField r = pointwise_ratio(qv, wb, 1e-12);
    EXPECT_DOUBLE_EQ(r(0, 0), 2.0);
    EXPECT_TRUE(std::isnan(r(1, 1)));
}

TEST(ModeFit, RecoversTwoModes) {
    SimParams p;
    p.dt = 1e-5;
    p.t_end = 0.02;
    p.noise = NoiseModel({{{2, 4}, 0.002}, {{1, 3}, 0.001}});
    const Trajectory traj = simulate(initial_condition(g64), p);
    const ModeFit fit = estimate_modes_lsq(traj, {{2, 4}, {1, 3}});
    ASSERT_EQ(fit.alpha.size(), 2);
    EXPECT_NEAR(fit.alpha(0), 0.002, 0.0002);
    EXPECT_NEAR(std::abs(fit.alpha(1)), 0.001, 0.0002);
    EXPECT_LT(fit.relative_residual, 0.5);
}
