#include "salt/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "salt/field_ops.hpp"
#include "salt/spectral.hpp"

namespace salt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPiSq = kTwoPi * kTwoPi;

void require_snapshots(const Trajectory& traj, const char* what) {
    if (traj.size() < 2)
        throw std::invalid_argument(std::string(what) + ": need at least 2 snapshots, got " +
                                    std::to_string(traj.size()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Vorticity route

VorticityEstimator::VorticityEstimator(Grid grid, WaveVector k, std::vector<std::size_t> strides)
    : grid_(grid), k_(k), strides_(std::move(strides)), profile_(sine_profile(k, grid)), sine_(grid) {
    require_resolvable(k, grid);
    for (int i = 0; i < grid.n(); ++i)
        for (int j = 0; j < grid.n(); ++j) sine_(i, j) = std::sin(kTwoPi * (k.k1 * grid.x(i) + k.k2 * grid.y(j)));
    if (strides_.empty()) throw std::invalid_argument("estimator needs at least one stride");
    for (std::size_t s : strides_) {
        if (s == 0) throw std::invalid_argument("stride must be >= 1");
        lanes_.push_back(Lane{s, ScalarField(grid), ScalarField(grid), ScalarField(grid),
                              ScalarField(grid)});
    }
}

VorticityEstimator::Sample VorticityEstimator::sample(const ScalarField& omega) const {
    // k_perp . grad w = k2 d1 w - k1 d2 w
    SpectralField c = to_spectral(omega);
    const int half = grid_.n() / 2;
    const double k_sq = double(k_.k1) * k_.k1 + double(k_.k2) * k_.k2;
    double grad_sq = 0.0;
    for (int i = 0; i < grid_.n(); ++i) {
        const double m1 = i == half ? 0.0 : grid_.wavenumber(i);
        for (int j = 0; j < grid_.spectral_cols(); ++j) {
            const double m2 = j == half ? 0.0 : j;
            const double multiplicity = (j == 0 || j == half) ? 1.0 : 2.0;
            grad_sq += multiplicity * kTwoPi * kTwoPi * (m1 * m1 + m2 * m2) * std::norm(c(i, j));
            c(i, j) *= SpectralField::Complex(0.0, kTwoPi * (k_.k2 * m1 - k_.k1 * m2));
        }
    }
    ScalarField g = to_physical(c);
    const ScalarField projected = dealiased(hadamard(sine_, g));
    for (double& v : g.values()) v *= v;
    return {std::move(g), k_sq * grad_sq, inner(projected, projected)};
}

void VorticityEstimator::push(double time, const ScalarField& omega) {
    require_same_grid(grid_, omega.grid(), "vorticity estimator");
    const std::size_t index = seen_++;
    std::optional<Sample> s;
    for (Lane& lane : lanes_) {
        if (index % lane.stride != 0) continue;
        if (!s) s = sample(omega);
        const ScalarField* g2 = &s->g2;
        if (lane.started) {
            if (!(time > lane.prev_time))
                throw std::invalid_argument("estimator snapshots must have increasing times");
            const double dt = time - lane.prev_time;
            auto qv = lane.qv.values();
            auto b = lane.b.values();
            const auto w = omega.values();
            const auto prev = lane.prev.values();
            const auto g = g2->values();
            const auto pg = lane.prev_g2.values();
            for (std::size_t q = 0; q < qv.size(); ++q) {
                const double d = w[q] - prev[q];
                qv[q] += d * d;
                b[q] += 0.5 * (g[q] + pg[q]) * dt;
            }
            lane.scale += 0.5 * (s->scale + lane.prev_scale) * dt;
            lane.resolved += 0.5 * (s->resolved + lane.prev_resolved) * dt;
            ++lane.increments;
        } else {
            lane.first_time = time;
            lane.started = true;
        }
        lane.prev = omega;
        lane.prev_g2 = *g2;
        lane.prev_scale = s->scale;
        lane.prev_resolved = s->resolved;
        lane.prev_time = time;
    }
}

QvField VorticityEstimator::qv(std::size_t which) const {
    const Lane& lane = lanes_.at(which);
    return {lane.qv, lane.prev_time - lane.first_time, lane.increments};
}

ScalarField VorticityEstimator::b_field(std::size_t which) const { return lanes_.at(which).b; }

ScalarField VorticityEstimator::weighted_b_field(std::size_t which) const {
    return hadamard(lanes_.at(which).b, profile_);
}

CalibrationResult VorticityEstimator::estimate(std::size_t which,
                                               std::optional<double> alpha_true) const {
    const Lane& lane = lanes_.at(which);
    if (lane.increments == 0)
        throw EstimationError("estimator needs at least 2 sampled snapshots");
    CalibrationResult r;
    r.k = k_;
    r.stride = lane.stride;
    r.samples = lane.increments;
    r.horizon = lane.prev_time - lane.first_time;
    // Both integrals over the unit torus are plain spatial means; averaging
    // before the division keeps nodal lines of the profile harmless.
    r.qv_mean = mean(lane.qv);
    r.weighted_b_mean = mean(weighted_b_field(which));
    // The solver injects the projected transport term, so its QV is matched
    // against the projected profile.
    r.resolved_b_mean = lane.resolved;
    // Both are bounded by |k|^2 |grad w|^2; compare against that so a
    // roundoff-level B is not mistaken for signal.
    if (!(r.resolved_b_mean > 0.0) || r.resolved_b_mean <= 1e-12 * lane.scale)
        throw EstimationError(
            "denominator of the alpha estimate vanishes: the flow has no gradient along k_perp");
    r.alpha_hat_sq = r.qv_mean / (kFourPiSq * r.resolved_b_mean);
    if (r.weighted_b_mean > 0.0) r.alpha_hat_unprojected = std::sqrt(r.qv_mean / (kFourPiSq * r.weighted_b_mean));
    r.alpha_hat = std::sqrt(r.alpha_hat_sq);
    if (alpha_true) r.relative_error = relative_error(r.alpha_hat, *alpha_true);
    return r;
}

// ---------------------------------------------------------------------------
// Energy route

EnergyEstimator::EnergyEstimator(Grid grid, std::vector<WaveVector> basis)
    : grid_(grid),
      basis_(std::move(basis)),
      prev_response_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_.size()))),
      gram_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis_.size()),
                                  static_cast<Eigen::Index>(basis_.size()))) {
    if (basis_.empty()) throw std::invalid_argument("energy estimator needs at least one mode");
    for (WaveVector k : basis_) basis_xi_.push_back(perp_gradient(basis_stream(k, grid_)));
}

void EnergyEstimator::push(double time, const ScalarField& omega) {
    require_same_grid(grid_, omega.grid(), "energy estimator");
    const VectorField u = biot_savart(omega);
    const double energy = 0.5 * inner(u, u);
    Eigen::VectorXd response(static_cast<Eigen::Index>(basis_.size()));
    for (std::size_t j = 0; j < basis_.size(); ++j) {
        const VectorField response_velocity = biot_savart(xi_transport(basis_xi_[j], omega));
        response(static_cast<Eigen::Index>(j)) = inner(u, response_velocity);
    }
    if (seen_ > 0) {
        if (!(time > prev_time_))
            throw std::invalid_argument("estimator snapshots must have increasing times");
        const double de = energy - prev_energy_;
        qv_ += de * de;
        const double dt = time - prev_time_;
        gram_ += 0.5 * dt *
                 (response * response.transpose() + prev_response_ * prev_response_.transpose());
    }
    prev_energy_ = energy;
    prev_time_ = time;
    prev_response_ = response;
    ++seen_;
}

double EnergyEstimator::energy_qv() const {
    if (seen_ < 2) throw std::invalid_argument("energy_qv: need at least 2 snapshots");
    return qv_;
}

Eigen::MatrixXd EnergyEstimator::gram() const {
    if (seen_ < 2) throw std::invalid_argument("assemble_gram: need at least 2 snapshots");
    return gram_;
}

Eigen::VectorXd EnergyDecomposition::rotate(const Eigen::VectorXd& alpha) const {
    return eigenvectors.transpose() * alpha;
}

double EnergyDecomposition::constraint_residual(const Eigen::VectorXd& alpha) const {
    const Eigen::VectorXd tilde = rotate(alpha);
    return qv_target - tilde.cwiseProduct(tilde).dot(eigenvalues);
}

EnergyDecomposition diagonalize_solve(const Eigen::MatrixXd& gram, double qv_target) {
    if (gram.rows() == 0 || gram.rows() != gram.cols())
        throw std::invalid_argument("Gram matrix must be square and non-empty");
    const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
    if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("Gram matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw EstimationError("eigendecomposition failed");

    EnergyDecomposition d;
    d.eigenvalues = solver.eigenvalues();
    d.eigenvectors = solver.eigenvectors();
    d.qv_target = qv_target;
    bool any = false;
    for (Eigen::Index j = 0; j < d.eigenvalues.size(); ++j) {
        const bool ok = d.eigenvalues(j) > kIdentifiabilityFloor;
        d.identifiable.push_back(ok);
        any = any || ok;
    }
    if (!any)
        throw EstimationError(
            "every Gram eigenvalue is below the identifiability floor; the noise "
            "coefficients cannot be recovered from this data");
    if (gram.rows() == 1) d.alpha_tilde_sq = qv_target / d.eigenvalues(0);
    return d;
}

// ---------------------------------------------------------------------------
// Multi-mode least squares

ModeFit estimate_modes_lsq(const Trajectory& traj, const std::vector<WaveVector>& basis) {
    require_snapshots(traj, "estimate_modes_lsq");
    if (basis.empty()) throw std::invalid_argument("estimate_modes_lsq: empty basis");
    const Grid& grid = traj.grid();
    const std::size_t m = basis.size();
    std::vector<VectorField> xis;
    for (WaveVector k : basis) xis.push_back(perp_gradient(basis_stream(k, grid)));

    // Unknown beta_ij (i <= j); column (i, j) is G_ij(x) = int T_i T_j ds with
    // T_j = grad_perp e_j . grad w, doubled off the diagonal.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) pairs.emplace_back(i, j);

    const auto points = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(points, static_cast<Eigen::Index>(pairs.size()));
    Eigen::VectorXd qv = Eigen::VectorXd::Zero(points);

    auto responses = [&](const ScalarField& w) {
        const VectorField grad = gradient(w);
        std::vector<ScalarField> t;
        for (const auto& xi : xis)
            t.push_back(hadamard(xi.first, grad.first) + hadamard(xi.second, grad.second));
        return t;
    };
    auto prev = responses(traj[0]);
    for (std::size_t s = 1; s < traj.size(); ++s) {
        auto cur = responses(traj[s]);
        const double dt = traj.times()[s] - traj.times()[s - 1];
        const auto w = traj[s].values();
        const auto wp = traj[s - 1].values();
        for (Eigen::Index q = 0; q < points; ++q) {
            const double d = w[q] - wp[q];
            qv(q) += d * d;
            for (std::size_t c = 0; c < pairs.size(); ++c) {
                const auto [i, j] = pairs[c];
                const double factor = i == j ? 1.0 : 2.0;
                design(q, static_cast<Eigen::Index>(c)) +=
                    factor * 0.5 * dt *
                    (cur[i].values()[q] * cur[j].values()[q] + prev[i].values()[q] * prev[j].values()[q]);
            }
        }
        prev = std::move(cur);
    }

    const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(qv);
    ModeFit fit;
    fit.beta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t c = 0; c < pairs.size(); ++c) {
        const auto [i, j] = pairs[c];
        fit.beta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sol(static_cast<Eigen::Index>(c));
        fit.beta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = sol(static_cast<Eigen::Index>(c));
    }
    const double qv_norm = qv.norm();
    fit.relative_residual = qv_norm > 0.0 ? (design * sol - qv).norm() / qv_norm : 0.0;

    // beta ~ alpha alpha^T: take the leading eigenpair.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(fit.beta);
    const Eigen::Index top = solver.eigenvalues().size() - 1;
    const double lambda = std::max(0.0, solver.eigenvalues()(top));
    fit.alpha = std::sqrt(lambda) * solver.eigenvectors().col(top);
    // alpha and -alpha give identical data; report the one whose largest entry is positive.
    Eigen::Index largest = 0;
    fit.alpha.cwiseAbs().maxCoeff(&largest);
    if (fit.alpha(largest) < 0.0) fit.alpha = -fit.alpha;
    return fit;
}

// ---------------------------------------------------------------------------
// Trajectory-level wrappers

double energy_qv(const Trajectory& traj) {
    require_snapshots(traj, "energy_qv");
    // e_t only; the Gram part is not needed here.
    double qv = 0.0;
    double prev = kinetic_energy(traj[0]);
    for (std::size_t s = 1; s < traj.size(); ++s) {
        const double e = kinetic_energy(traj[s]);
        qv += (e - prev) * (e - prev);
        prev = e;
    }
    return qv;
}

QvField vorticity_qv(const Trajectory& traj) {
    require_snapshots(traj, "vorticity_qv");
    QvField out{ScalarField(traj.grid()), traj.times().back() - traj.times().front(),
                traj.size() - 1};
    auto qv = out.values.values();
    for (std::size_t s = 1; s < traj.size(); ++s) {
        const auto w = traj[s].values();
        const auto wp = traj[s - 1].values();
        for (std::size_t q = 0; q < qv.size(); ++q) qv[q] += (w[q] - wp[q]) * (w[q] - wp[q]);
    }
    return out;
}

ScalarField b_field(const Trajectory& traj, WaveVector k) {
    require_snapshots(traj, "b_field");
    VorticityEstimator est(traj.grid(), k);
    for (std::size_t s = 0; s < traj.size(); ++s) est.push(traj.times()[s], traj[s]);
    return est.b_field();
}

Eigen::MatrixXd assemble_gram(const Trajectory& traj, const std::vector<WaveVector>& basis) {
    require_snapshots(traj, "assemble_gram");
    EnergyEstimator est(traj.grid(), basis);
    for (std::size_t s = 0; s < traj.size(); ++s) est.push(traj.times()[s], traj[s]);
    return est.gram();
}

std::optional<double> true_alpha(const NoiseModel& model, WaveVector k) {
    for (const auto& m : model.modes())
        if (m.k == k) return m.alpha;
    return std::nullopt;
}

CalibrationResult estimate_alpha(const Trajectory& traj, WaveVector k,
                                 std::optional<double> alpha_true) {
    require_snapshots(traj, "estimate_alpha");
    if (!alpha_true) alpha_true = true_alpha(traj.noise(), k);
    if (alpha_true && *alpha_true == 0.0) alpha_true.reset();
    VorticityEstimator est(traj.grid(), k);
    for (std::size_t s = 0; s < traj.size(); ++s) est.push(traj.times()[s], traj[s]);
    return est.estimate(0, alpha_true);
}

void attach_energy_route(CalibrationResult& result, double qv, const Eigen::MatrixXd& gram) {
    result.energy_qv = qv;
    result.gram = gram;
    const EnergyDecomposition d = diagonalize_solve(gram, qv);
    result.eigenvalues = d.eigenvalues;
    if (d.alpha_tilde_sq) {
        result.alpha_tilde = Eigen::VectorXd::Constant(1, std::sqrt(std::max(0.0, *d.alpha_tilde_sq)));
        result.energy_residual = qv - result.alpha_hat_sq * gram(0, 0);
    }
}

double relative_error(double alpha_hat, double alpha_true) {
    if (alpha_true == 0.0) throw std::invalid_argument("relative_error: true alpha is zero");
    return std::abs(alpha_true - alpha_hat) / std::abs(alpha_true);
}

ScalarField pointwise_ratio(const ScalarField& qv, const ScalarField& weighted_b, double floor) {
    require_same_grid(qv.grid(), weighted_b.grid(), "pointwise_ratio");
    ScalarField out(qv.grid());
    auto o = out.values();
    const auto n = qv.values();
    const auto d = weighted_b.values();
    for (std::size_t q = 0; q < o.size(); ++q)
        o[q] = d[q] > floor ? n[q] / (kFourPiSq * d[q]) : std::numeric_limits<double>::quiet_NaN();
    return out;
}

std::size_t subsampling_stride(std::size_t available, std::size_t requested) {
    if (requested == 0) throw std::invalid_argument("sample count must be positive");
    if (requested > available)
        throw std::invalid_argument("requested N=" + std::to_string(requested) + " exceeds the " +
                                    std::to_string(available) + " available increments");
    const auto stride = static_cast<std::size_t>(
        std::llround(static_cast<double>(available) / static_cast<double>(requested)));
    return std::max<std::size_t>(1, stride);
}

std::vector<std::size_t> strides_for(std::size_t available, const std::vector<std::size_t>& n_list) {
    std::vector<std::size_t> strides;
    for (std::size_t n : n_list) {
        const std::size_t s = subsampling_stride(available, n);
        if (std::find(strides.begin(), strides.end(), s) == strides.end()) strides.push_back(s);
    }
    return strides;
}

std::vector<ConvergenceRow> convergence_rows(const VorticityEstimator& est,
                                             const std::vector<std::size_t>& n_list,
                                             std::optional<double> alpha_true) {
    if (est.snapshots_seen() < 2)
        throw std::invalid_argument("convergence study needs at least 2 snapshots");
    const std::size_t available = est.snapshots_seen() - 1;
    const auto& strides = est.strides();
    std::vector<ConvergenceRow> rows;
    for (std::size_t n : n_list) {
        const std::size_t s = subsampling_stride(available, n);
        const auto it = std::find(strides.begin(), strides.end(), s);
        if (it == strides.end())
            throw std::invalid_argument("estimator was not configured for stride " + std::to_string(s));
        rows.push_back({n, s, est.estimate(static_cast<std::size_t>(it - strides.begin()), alpha_true)});
    }
    return rows;
}

std::vector<ConvergenceRow> convergence_study(const Trajectory& traj, WaveVector k,
                                              const std::vector<std::size_t>& n_list,
                                              std::optional<double> alpha_true) {
    require_snapshots(traj, "convergence_study");
    if (!alpha_true) alpha_true = true_alpha(traj.noise(), k);
    if (alpha_true && *alpha_true == 0.0) alpha_true.reset();
    VorticityEstimator est(traj.grid(), k, strides_for(traj.size() - 1, n_list));
    for (std::size_t s = 0; s < traj.size(); ++s) est.push(traj.times()[s], traj[s]);
    return convergence_rows(est, n_list, alpha_true);
}

}  // namespace salt
