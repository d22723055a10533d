#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "salt/field.hpp"
#include "salt/noise.hpp"
#include "salt/solver.hpp"

namespace salt {

/// Realized quadratic variation sum_i (w_{t_i}(x) - w_{t_{i-1}}(x))^2.
struct QvField {
    ScalarField values;
    double horizon = 0.0;
    std::size_t samples = 0;
};

/// Outcome of the single-mode vorticity estimator, optionally augmented with
/// the energy-route quantities for the same data.
struct CalibrationResult {
    WaveVector k;
    double alpha_hat = 0.0;
    double alpha_hat_sq = 0.0;
    /// |alpha - alpha_hat| / alpha when the true amplitude is known.
    std::optional<double> relative_error;
    /// Spatial means of the QV field and of B(t,k,x) sin^2(2 pi k.x).
    double qv_mean = 0.0;
    double weighted_b_mean = 0.0;
    /// Time integral of the mean of P[sin(2 pi k.x) k_perp.grad w]^2, with P
    /// the 2/3-rule projection the solver applies to the noise term.
    double resolved_b_mean = 0.0;
    /// sqrt(qv_mean / (4 pi^2 weighted_b_mean)), which ignores the
    /// projection and is biased low when the flow has energy near the cutoff.
    double alpha_hat_unprojected = 0.0;
    double horizon = 0.0;
    std::size_t samples = 0;
    std::size_t stride = 1;

    // Energy route (filled by attach_energy_route).
    std::optional<double> energy_qv;
    Eigen::MatrixXd gram;
    Eigen::VectorXd eigenvalues;
    Eigen::VectorXd alpha_tilde;
    /// energy_qv - alpha_hat^2 * A_11 for a single mode.
    std::optional<double> energy_residual;
};

/// Consumes snapshots in time order and accumulates, for several subsampling
/// strides at once, the vorticity QV field and the trapezoidal
/// B(t,k,x) = int_0^t (k_perp . grad w_s(x))^2 ds.
///
/// Snapshot i enters the stride-s estimate when i % s == 0, so stride 1 uses
/// every snapshot and the estimates for all strides come from one pass.
class VorticityEstimator {
public:
    VorticityEstimator(Grid grid, WaveVector k, std::vector<std::size_t> strides = {1});

    void push(double time, const ScalarField& omega);

    std::size_t snapshots_seen() const { return seen_; }
    const std::vector<std::size_t>& strides() const { return strides_; }
    WaveVector k() const { return k_; }

    QvField qv(std::size_t which = 0) const;
    ScalarField b_field(std::size_t which = 0) const;
    /// B(t,k,x) sin^2(2 pi k.x), the model profile that QV is matched against.
    ScalarField weighted_b_field(std::size_t which = 0) const;

    /// alpha_hat^2 = mean(QV) / (4 pi^2 resolved_b_mean). Throws
    /// EstimationError when fewer than two snapshots were sampled or the
    /// denominator vanishes.
    CalibrationResult estimate(std::size_t which = 0,
                               std::optional<double> alpha_true = std::nullopt) const;

private:
    struct Lane {
        std::size_t stride;
        ScalarField qv, b, prev, prev_g2;
        double first_time = 0.0, prev_time = 0.0;
        // trapezoid of mean |k|^2 |grad w|^2, the scale B is compared against
        double scale = 0.0, prev_scale = 0.0;
        double resolved = 0.0, prev_resolved = 0.0;
        std::size_t increments = 0;
        bool started = false;
    };

    struct Sample {
        ScalarField g2;         // (k_perp . grad w)^2
        double scale = 0.0;     // mean of |k|^2 |grad w|^2
        double resolved = 0.0;  // mean of P[sin(2 pi k.x) k_perp . grad w]^2
    };
    Sample sample(const ScalarField& omega) const;

    Grid grid_;
    WaveVector k_;
    std::vector<std::size_t> strides_;
    std::vector<Lane> lanes_;
    ScalarField profile_;
    ScalarField sine_;
    std::size_t seen_ = 0;
};

/// Energy route: e_t increments and the Gram matrix
/// A_ij = int <u, K*(grad_perp e_j . grad w)> <u, K*(grad_perp e_i . grad w)> ds.
class EnergyEstimator {
public:
    EnergyEstimator(Grid grid, std::vector<WaveVector> basis);

    void push(double time, const ScalarField& omega);

    std::size_t snapshots_seen() const { return seen_; }
    /// sum_i (e_{t_i} - e_{t_{i-1}})^2; throws std::invalid_argument with fewer
    /// than two snapshots.
    double energy_qv() const;
    /// Symmetric M x M matrix integrated with the trapezoidal rule.
    Eigen::MatrixXd gram() const;

private:
    Grid grid_;
    std::vector<WaveVector> basis_;
    std::vector<VectorField> basis_xi_;
    double qv_ = 0.0;
    double prev_energy_ = 0.0, prev_time_ = 0.0;
    Eigen::VectorXd prev_response_;
    Eigen::MatrixXd gram_;
    std::size_t seen_ = 0;
};

/// Eigendecomposition of the Gram matrix with the energy-QV constraint
/// qv = sum_j alpha_tilde_j^2 lambda_j.
struct EnergyDecomposition {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // orthonormal columns
    std::vector<bool> identifiable;
    double qv_target = 0.0;
    /// Single-mode solution qv / lambda_1.
    std::optional<double> alpha_tilde_sq;

    /// alpha_tilde = U^T alpha
    Eigen::VectorXd rotate(const Eigen::VectorXd& alpha) const;
    /// qv - sum_j alpha_tilde_j^2 lambda_j
    double constraint_residual(const Eigen::VectorXd& alpha) const;
};

/// Eigenvalues at or below this are treated as carrying no information.
inline constexpr double kIdentifiabilityFloor = 1e-14;

/// Throws std::invalid_argument for a non-symmetric matrix and
/// EstimationError when every eigenvalue is below kIdentifiabilityFloor.
EnergyDecomposition diagonalize_solve(const Eigen::MatrixXd& gram, double qv_target);

/// Spatially resolved multi-mode fit: QV(x) ~ sum_ij beta_ij G_ij(x) solved in
/// least squares over grid points, then alpha from the leading eigenpair of beta.
struct ModeFit {
    Eigen::MatrixXd beta;
    Eigen::VectorXd alpha;
    double relative_residual = 0.0;
};

ModeFit estimate_modes_lsq(const Trajectory& traj, const std::vector<WaveVector>& basis);

double energy_qv(const Trajectory& traj);
QvField vorticity_qv(const Trajectory& traj);
ScalarField b_field(const Trajectory& traj, WaveVector k);
Eigen::MatrixXd assemble_gram(const Trajectory& traj, const std::vector<WaveVector>& basis);

/// Single-mode estimate on all snapshots. The true amplitude defaults to the
/// trajectory's noise mode with wavevector k, if any.
CalibrationResult estimate_alpha(const Trajectory& traj, WaveVector k,
                                 std::optional<double> alpha_true = std::nullopt);

/// Adds energy QV, the 1x1 Gram matrix, its eigenvalue and the residual.
void attach_energy_route(CalibrationResult& result, double energy_qv, const Eigen::MatrixXd& gram);

/// Throws std::invalid_argument for alpha_true == 0.
double relative_error(double alpha_hat, double alpha_true);

/// Ratio QV / (4 pi^2 B sin^2) per point, NaN where the denominator is below
/// `floor`. Diagnostic only.
ScalarField pointwise_ratio(const ScalarField& qv, const ScalarField& weighted_b, double floor);

struct ConvergenceRow {
    std::size_t requested_n = 0;
    std::size_t stride = 1;
    CalibrationResult result;
};

/// Stride used to subsample `available` increments down to about `requested`.
/// Throws std::invalid_argument when requested is 0 or exceeds available.
std::size_t subsampling_stride(std::size_t available, std::size_t requested);

std::vector<ConvergenceRow> convergence_study(const Trajectory& traj, WaveVector k,
                                              const std::vector<std::size_t>& n_list,
                                              std::optional<double> alpha_true = std::nullopt);

/// Distinct strides needed to serve every entry of n_list.
std::vector<std::size_t> strides_for(std::size_t available, const std::vector<std::size_t>& n_list);

/// Rows for an estimator already fed with every snapshot.
std::vector<ConvergenceRow> convergence_rows(const VorticityEstimator& est,
                                             const std::vector<std::size_t>& n_list,
                                             std::optional<double> alpha_true);

/// Amplitude of the mode with wavevector k in the model, if present.
std::optional<double> true_alpha(const NoiseModel& model, WaveVector k);

}  // namespace salt
