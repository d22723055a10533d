#include <gtest/gtest.h>

#include <cmath>

#include "salt/field_ops.hpp"
#include "salt/robustness.hpp"
#include "test_support.hpp"

using namespace salt;
using salt::testing::max_diff;
using salt::testing::random_field;

namespace {

const Grid g64{64};

SimParams robust_params(double t_end = 0.2) {
    SimParams p;
    p.dt = 1e-3;
    p.t_end = t_end;
    p.noise = NoiseModel::single({2, 4}, 0.001);
    return p;
}

struct Inputs {
    ScalarField w0 = initial_condition(g64);
    VectorField xi1 = build_xi(NoiseModel::single({2, 4}, 0.001), g64);
    VectorField eta = unit_perturbation({1, 3}, g64);
};

}  // namespace

TEST(PairedRun, IdenticalInputsGiveIdenticalTrajectories) {
    const Inputs s;
    const PairedRun pair = paired_simulate(s.w0, s.w0, s.xi1, s.xi1, robust_params());
    EXPECT_TRUE(pair.first == pair.second);
    const RobustnessReport r = distance_series(pair);
    for (double d : r.distances) EXPECT_EQ(d, 0.0);
    EXPECT_EQ(r.sup_distance, 0.0);
}

TEST(PairedRun, SmallInitialPerturbationStaysSmallAndContinuous) {
    const Inputs s;
    const double eps = 1e-6;
    const ScalarField w2 = s.w0 + eps * random_field(g64, 3, 8, 0.0);
    const RobustnessReport r = distance_series(paired_simulate(s.w0, w2, s.xi1, s.xi1, robust_params()));
    for (std::size_t i = 0; i < r.distances.size(); ++i) {
        EXPECT_TRUE(std::isfinite(r.distances[i]));
        EXPECT_LT(r.distances[i], 100 * r.initial_distance);
        if (i > 0) EXPECT_LT(std::abs(r.distances[i] - r.distances[i - 1]), 0.05 * r.initial_distance);
    }
}

TEST(PairedRun, LabelSwapLeavesDistancesUnchanged) {
    const Inputs s;
    const VectorField xi2 = s.xi1 + 1e-3 * s.eta;
    const ScalarField w2 = s.w0 + 1e-4 * random_field(g64, 5, 6, 0.0);
    const auto p = robust_params();
    const RobustnessReport ab = distance_series(paired_simulate(s.w0, w2, s.xi1, xi2, p));
    const RobustnessReport ba = distance_series(paired_simulate(w2, s.w0, xi2, s.xi1, p));
    EXPECT_EQ(ab.distances, ba.distances);
    EXPECT_EQ(ab.xi_distance, ba.xi_distance);
}

TEST(PairedRun, GridMismatchRejected) {
    const Inputs s;
    EXPECT_THROW(paired_simulate(s.w0, ScalarField(Grid(32)), s.xi1, s.xi1, robust_params()), DimensionError);
}

TEST(DistanceSeries, InitialDistanceAndTriangleInequality) {
    const Inputs s;
    const auto p = robust_params(0.1);
    const BrownianPath path = brownian_increments(p.steps(), p.dt, 9);
    const ScalarField w2 = s.w0 + 1e-3 * random_field(g64, 6, 8, 0.0);
    const Trajectory a = simulate(s.w0, p, s.xi1, path);
    const Trajectory b = simulate(w2, p, s.xi1 + 1e-3 * s.eta, path);
    const Trajectory c = simulate(s.w0, p, s.xi1 - 2e-3 * s.eta, path);
    const RobustnessReport ab = distance_series(a, b);
    const RobustnessReport bc = distance_series(b, c);
    const RobustnessReport ac = distance_series(a, c);
    EXPECT_NEAR(ab.distances[0], l2_norm(s.w0 - w2), 1e-14);
    EXPECT_EQ(ab.initial_distance, ab.distances[0]);
    for (std::size_t i = 0; i < ab.distances.size(); ++i)
        EXPECT_LE(ac.distances[i], ab.distances[i] + bc.distances[i] + 1e-15);
}

TEST(DistanceSeries, RequiresMatchingTimes) {
    const Inputs s;
    auto p = robust_params(0.1);
    const Trajectory a = simulate(s.w0, p);
    p.t_end = 0.05;
    EXPECT_THROW(distance_series(a, simulate(s.w0, p)), std::invalid_argument);
}

TEST(Gronwall, ZeroHorizonFrozenAndMonotone) {
    const GronwallConstants c;  // c1 = c2 = 1, k = 3, p = 2
    const ScalarField w = random_field(g64, 2, 6);
    Trajectory frozen(g64, 0.1, 0, NoiseModel{});
    for (int s = 0; s <= 10; ++s) frozen.append(0.1 * s, w);
    EXPECT_EQ(gronwall_discount(frozen, 0.0, c), 0.0);
    const double norm = sobolev_norm(w, 3);
    for (double t : {0.3, 0.55, 1.0})
        EXPECT_NEAR(gronwall_discount(frozen, t, c), norm * norm * t + t * t, 1e-9 * norm * norm);

    const Trajectory traj = simulate(initial_condition(g64), robust_params());
    double prev = 0.0;
    for (double t = 0.0; t <= 0.2; t += 0.0125) {
        const double g = gronwall_discount(traj, t, c);
        EXPECT_GE(g, prev);
        prev = g;
    }
}

TEST(Gronwall, RejectsBadArguments) {
    const Trajectory traj = simulate(initial_condition(g64), robust_params(0.01));
    GronwallConstants c;
    c.sobolev_order = -1;
    EXPECT_THROW(gronwall_discount(traj, 0.01, c), std::invalid_argument);
    EXPECT_THROW(gronwall_discount(traj, 0.5, GronwallConstants{}), std::invalid_argument);
}

TEST(LemmaTerms, IdenticalPairIsZero) {
    const Inputs s;
    const PairedRun pair = paired_simulate(s.w0, s.w0, s.xi1, s.xi1, robust_params(0.05));
    const LemmaTerms t = lemma_terms(pair, pair.first.size() - 1);
    EXPECT_EQ(t.q, 0.0);
    EXPECT_EQ(t.a_total, 0.0);
    EXPECT_EQ(t.b_total, 0.0);
    EXPECT_EQ(t.a, 0.0);
    EXPECT_EQ(t.b, 0.0);
    EXPECT_EQ(t.c, 0.0);
}

TEST(LemmaTerms, DecompositionAndSignIdentities) {
    const Inputs s;
    const ScalarField w2 = s.w0 + 1e-2 * random_field(g64, 12, 8, 0.0);
    const PairedRun pair = paired_simulate(s.w0, w2, s.xi1, s.xi1 + 0.3 * s.eta, robust_params(0.1));
    for (std::size_t snap = 0; snap < pair.first.size(); snap += 10) {
        const LemmaTerms t = lemma_terms(pair, snap);
        EXPECT_LE(t.c, 1e-8);
        EXPECT_NEAR(t.c, -t.c_magnitude, 1e-10 * std::max(1.0, t.c_magnitude));
        EXPECT_NEAR(t.decomposition_residual(), 0.0, 1e-10);
        EXPECT_NEAR(t.advection, 0.0, 1e-10);
        EXPECT_GE(t.a_total, 0.0);
        EXPECT_GT(t.q_bound, 0.0);
    }
}

TEST(ScalingStudy, ZeroDeltaRowAndShape) {
    const Inputs s;
    const double xi_norm = l2_norm(s.xi1);
    const std::vector<double> deltas{0.0, 1e-3 * xi_norm, 1e-2 * xi_norm};
    const ScalingStudy study = scaling_study(s.w0, s.xi1, s.eta, deltas, robust_params(0.1), {1, 2});
    ASSERT_EQ(study.rows.size(), 3u);
    EXPECT_EQ(study.rows[0].sup_distance, 0.0);
    EXPECT_TRUE(std::isnan(study.rows[0].fitted_constant));
    EXPECT_EQ(study.rows[1].per_seed_sup.size(), 2u);
    EXPECT_NEAR(study.rows[2].xi_distance, 1e-2 * xi_norm, 1e-15);
    EXPECT_GT(study.rows[2].sup_distance, study.rows[1].sup_distance);
    EXPECT_GT(study.rows[1].gamma, 0.0);
    EXPECT_GT(study.slope, 0.8);
    EXPECT_LT(study.slope, 1.2);
}

TEST(ScalingStudy, LongerHorizonNeverDecreasesSup) {
    const Inputs s;
    const std::vector<double> deltas{1e-2 * l2_norm(s.xi1)};
    const double shorter = scaling_study(s.w0, s.xi1, s.eta, deltas, robust_params(0.1), {4}).rows[0].sup_distance;
    const double longer = scaling_study(s.w0, s.xi1, s.eta, deltas, robust_params(0.2), {4}).rows[0].sup_distance;
    EXPECT_GE(longer, shorter);
}

TEST(ScalingStudy, ContinuityInBothInputs) {
    // sup distance shrinks as the initial and noise differences shrink together.
    const Inputs s;
    const auto p = robust_params(0.1);
    const ScalarField bump = random_field(g64, 21, 6, 0.0);
    std::vector<double> sups;
    for (double scale : {1e-2, 1e-3, 1e-4}) {
        const PairedRun pair = paired_simulate(s.w0, s.w0 + scale * bump, s.xi1, s.xi1 + scale * s.eta, p);
        sups.push_back(distance_series(pair).sup_distance);
    }
    EXPECT_GT(sups[0], sups[1]);
    EXPECT_GT(sups[1], sups[2]);
    EXPECT_LT(sups[2], 1e-3);
}

TEST(LogLogSlope, ExactPowerLaw) {
    EXPECT_NEAR(loglog_slope({1, 10, 100}, {3, 30, 300}), 1.0, 1e-12);
    EXPECT_NEAR(loglog_slope({1, 2, 4}, {1, 4, 16}), 2.0, 1e-12);
    EXPECT_THROW(loglog_slope({1}, {1}), std::invalid_argument);
    EXPECT_THROW(loglog_slope({0, 1}, {1, 1}), std::invalid_argument);
}

TEST(UnitPerturbation, UnitNormAndDivergenceFree) {
    const VectorField eta = unit_perturbation({1, 3}, g64);
    EXPECT_NEAR(l2_norm(eta), 1.0, 1e-12);
    EXPECT_LT(max_abs(divergence(eta)), 1e-10);
}
