#include "salt/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "salt/field_ops.hpp"

namespace salt {

PairedRun paired_simulate(const ScalarField& omega0_first, const ScalarField& omega0_second,
                          const VectorField& xi_first, const VectorField& xi_second,
                          const SimParams& params, const BrownianPath& path) {
    require_same_grid(params.grid, omega0_first.grid(), "paired run");
    require_same_grid(params.grid, omega0_second.grid(), "paired run");
    require_same_grid(params.grid, xi_first.grid(), "paired run");
    require_same_grid(params.grid, xi_second.grid(), "paired run");
    return {simulate(omega0_first, params, xi_first, path),
            simulate(omega0_second, params, xi_second, path), xi_first, xi_second};
}

PairedRun paired_simulate(const ScalarField& omega0_first, const ScalarField& omega0_second,
                          const VectorField& xi_first, const VectorField& xi_second,
                          const SimParams& params) {
    const std::size_t steps = params.steps();
    const BrownianPath path = steps == 0 ? BrownianPath(params.dt, {}, params.seed)
                                         : brownian_increments(steps, params.dt, params.seed);
    return paired_simulate(omega0_first, omega0_second, xi_first, xi_second, params, path);
}

RobustnessReport distance_series(const Trajectory& a, const Trajectory& b) {
    if (a.times() != b.times())
        throw std::invalid_argument("distance_series: trajectories have different time stamps");
    require_same_grid(a.grid(), b.grid(), "distance_series");
    RobustnessReport r;
    r.times = a.times();
    for (std::size_t s = 0; s < a.size(); ++s) {
        const double d = l2_norm(a[s] - b[s]);
        r.distances.push_back(d);
        r.sup_distance = std::max(r.sup_distance, d);
    }
    if (!r.distances.empty()) r.initial_distance = r.distances.front();
    return r;
}

RobustnessReport distance_series(const PairedRun& pair) {
    RobustnessReport r = distance_series(pair.first, pair.second);
    r.xi_distance = l2_norm(pair.xi_first - pair.xi_second);
    return r;
}

double gronwall_discount(const Trajectory& traj, double horizon, const GronwallConstants& constants) {
    if (constants.sobolev_order < 0) throw std::invalid_argument("Sobolev order must be >= 0");
    if (traj.empty()) throw std::invalid_argument("gronwall_discount: empty trajectory");
    const auto& t = traj.times();
    if (horizon < t.front() || horizon > t.back() * (1.0 + 1e-12))
        throw std::invalid_argument("gronwall_discount: horizon outside the trajectory");
    auto integrand = [&](std::size_t s) {
        return std::pow(sobolev_norm(traj[s], constants.sobolev_order), constants.p);
    };
    double integral = 0.0;
    double prev = integrand(0);
    for (std::size_t s = 1; s < traj.size() && t[s - 1] < horizon; ++s) {
        const double cur = integrand(s);
        const double span = t[s] - t[s - 1];
        if (t[s] <= horizon) {
            integral += 0.5 * span * (prev + cur);
        } else {
            const double frac = (horizon - t[s - 1]) / span;
            const double at_horizon = prev + frac * (cur - prev);
            integral += 0.5 * (horizon - t[s - 1]) * (prev + at_horizon);
        }
        prev = cur;
    }
    const double elapsed = horizon - t.front();
    return constants.c1 * integral + constants.c2 * std::pow(elapsed, constants.p);
}

LemmaTerms lemma_terms(const PairedRun& pair, std::size_t snapshot, int sobolev_order) {
    const ScalarField& w1 = pair.first.snapshots().at(snapshot);
    const ScalarField& w2 = pair.second.snapshots().at(snapshot);
    const VectorField& xi1 = pair.xi_first;
    const VectorField& xi2 = pair.xi_second;
    const ScalarField wbar = w1 - w2;
    const VectorField xibar = xi1 - xi2;

    const ScalarField t1 = xi_transport(xi1, w1);
    const ScalarField t2 = xi_transport(xi2, w2);
    const ScalarField transport_diff = t1 - t2;
    const ScalarField second_order_diff = xi_transport(xi1, t1) - xi_transport(xi2, t2);
    const ScalarField xi2_wbar = xi_transport(xi2, wbar);

    LemmaTerms out;
    out.time = pair.first.times().at(snapshot);
    out.q = std::abs(inner(wbar, transport_diff));
    out.a_total = inner(transport_diff, transport_diff);
    out.b_total = inner(wbar, second_order_diff);
    out.a = inner(wbar, xi_transport(xibar, t1));
    out.b = inner(wbar, xi_transport(xi2, xi_transport(xibar, w1)));
    out.c = inner(wbar, xi_transport(xi2, xi2_wbar));
    out.c_magnitude = inner(xi2_wbar, xi2_wbar);
    out.advection = inner(wbar, advection(biot_savart(w2), wbar));

    const double wbar_sq = inner(wbar, wbar);
    const double xibar_sq = inner(xibar, xibar);
    const double w1_sobolev = sobolev_norm(w1, sobolev_order);
    const double w1_sobolev_sq = w1_sobolev * w1_sobolev;
    out.q_bound = wbar_sq + w1_sobolev_sq * xibar_sq;
    out.a_total_bound = wbar_sq + w1_sobolev_sq * xibar_sq;
    out.b_total_bound = w1_sobolev_sq * wbar_sq + xibar_sq;
    return out;
}

VectorField unit_perturbation(WaveVector k, const Grid& grid) {
    VectorField eta = perp_gradient(basis_stream(k, grid));
    const double norm = l2_norm(eta);
    eta *= 1.0 / norm;
    return eta;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("loglog_slope: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    if (lx.size() < 2) throw std::invalid_argument("loglog_slope: need two positive points");
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i] / n;
        my += ly[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("loglog_slope: x values are all equal");
    return sxy / sxx;
}

namespace {

struct SeedOutcome {
    std::vector<double> sup;  // per delta
    double gamma = 0.0;
};

SeedOutcome run_seed(const ScalarField& omega0, const VectorField& xi1, const VectorField& eta,
                     const std::vector<double>& deltas, SimParams params, std::uint64_t seed,
                     const GronwallConstants& constants) {
    params.seed = seed;
    const std::size_t steps = params.steps();
    const BrownianPath path = steps == 0 ? BrownianPath(params.dt, {}, seed)
                                         : brownian_increments(steps, params.dt, seed);
    const Trajectory base = simulate(omega0, params, xi1, path);
    SeedOutcome out;
    out.gamma = gronwall_discount(base, base.times().back(), constants);
    for (double delta : deltas) {
        if (delta == 0.0) {
            out.sup.push_back(0.0);
            continue;
        }
        const Trajectory other = simulate(omega0, params, xi1 + delta * eta, path);
        out.sup.push_back(distance_series(base, other).sup_distance);
    }
    return out;
}

}  // namespace

ScalingStudy scaling_study(const ScalarField& omega0, const VectorField& xi1, const VectorField& eta,
                           const std::vector<double>& deltas, const SimParams& params,
                           const std::vector<std::uint64_t>& seeds,
                           const GronwallConstants& constants) {
    if (seeds.empty()) throw std::invalid_argument("scaling_study: need at least one seed");
    params.validate();

    // Replicas share nothing mutable; launch them together and reduce in seed order.
    std::vector<std::future<SeedOutcome>> jobs;
    for (std::uint64_t seed : seeds)
        jobs.push_back(std::async(std::launch::async, run_seed, std::cref(omega0), std::cref(xi1),
                                  std::cref(eta), std::cref(deltas), params, seed,
                                  std::cref(constants)));
    std::vector<SeedOutcome> outcomes;
    for (auto& job : jobs) outcomes.push_back(job.get());

    const double eta_norm = l2_norm(eta);
    const double count = static_cast<double>(seeds.size());
    ScalingStudy study;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        ScalingRow row;
        row.delta = deltas[i];
        row.xi_distance = std::abs(deltas[i]) * eta_norm;
        for (const auto& o : outcomes) {
            row.per_seed_sup.push_back(o.sup[i]);
            row.sup_distance += o.sup[i] / count;
            row.sup_distance_p += std::pow(o.sup[i], constants.p) / count;
            row.gamma += o.gamma / count;
        }
        const double rhs = std::pow(row.xi_distance, constants.p);
        row.fitted_constant =
            rhs > 0.0 ? row.sup_distance_p / rhs : std::numeric_limits<double>::quiet_NaN();
        if (row.xi_distance > 0.0) {
            xs.push_back(row.xi_distance);
            ys.push_back(row.sup_distance);
        }
        study.rows.push_back(std::move(row));
    }
    if (xs.size() >= 2) study.slope = loglog_slope(xs, ys);
    return study;
}

}  // namespace salt
