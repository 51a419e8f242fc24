#pragma once

#include <optional>
#include <vector>

#include "ou/field_ops.hpp"
#include "ou/semigroup.hpp"
#include "ou/thickset.hpp"

namespace ou {

/// Partial measurements u|_omega at a list of times, optionally with the
/// time-derivative channel (z = du/dt restricted to omega).
struct ObservationData {
    std::vector<double> times;        // sorted, in (0, T]
    std::vector<Field> snapshots;     // masked solution samples
    std::vector<Field> derivative_snapshots;  // masked z samples (may be empty)
    double noise_level = 0.0;
    std::uint64_t seed = 0;
};

struct ReconstructionResult {
    Field u0_hat;
    double relative_error = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> residual_history;  // nonincreasing stacked LS residuals
    double alpha_reg = 0.0;
    int cg_iterations = 0;
    bool converged = false;
    double final_normal_residual = 0.0;
};

struct StabilityFit {
    std::vector<double> noise_levels;
    std::vector<double> data_norms;   // measured eta per level (median over seeds)
    std::vector<double> recon_errors; // median over seeds
    double fitted_C = std::numeric_limits<double>::quiet_NaN();
    double fitted_alpha = std::numeric_limits<double>::quiet_NaN();
    double fit_r2 = std::numeric_limits<double>::quiet_NaN();
    // per-run records: level, seed, eta_l2, eta_h1, error, alpha_reg, cg_iterations
    struct Run {
        double level;
        std::uint64_t seed;
        double eta_l2;
        double eta_h1;
        double error;
        double alpha_reg;
        int cg_iterations;
    };
    std::vector<Run> runs;
};

/// The discrete observation operator F: u0 -> (restrict(T(t_i) u0))_i,
/// assembled from shared propagator stages so that the exact adjoint
/// F* d = sum_i T(t_i)* restrict(d_i) is available.
class ObservationOperator {
public:
    ObservationOperator(const OUModel& model, const GridSpec& grid,
                        const ObservationMask& mask, std::vector<double> times,
                        const PropagatorConfig& cfg = {});

    std::vector<Field> apply(const Field& u0) const;
    Field apply_adjoint(const std::vector<Field>& data) const;

    const std::vector<double>& times() const { return times_; }
    const ObservationMask& mask() const { return mask_; }
    const GridSpec& grid() const { return grid_; }

private:
    GridSpec grid_;
    ObservationMask mask_;
    std::vector<double> times_;
    PropagatorConfig cfg_;
    std::vector<FourierPropagator> props_;
};

/// Measurement model: snapshots restrict(T(t_i) u0); with_derivative adds
/// restrict(T(t_i) A u0) (z = du/dt solves the same equation with datum
/// A u0).
ObservationData forward_observe(const OUModel& model, const Field& u0,
                                const ObservationMask& mask,
                                const std::vector<double>& times,
                                const PropagatorConfig& cfg = {},
                                bool with_derivative = false);

/// Gaussian perturbation supported on omega, scaled so its stacked L2 norm
/// equals level times the clean data norm (per channel); deterministic in
/// seed.
ObservationData add_noise(const ObservationData& data, const ObservationMask& mask,
                          double level, std::uint64_t seed);

/// sum_i T(t_i)* restrict(d_i).
Field adjoint_observe(const OUModel& model, const ObservationData& data,
                      const ObservationMask& mask, const PropagatorConfig& cfg = {});

/// Tikhonov least squares by CGLS on the stacked operator [F; sqrt(alpha) I]
/// (equivalent to CG on (F*F + alpha I) u = F* d; the recorded stacked
/// residual is monotone by construction of the iteration).
ReconstructionResult tikhonov_reconstruct(const OUModel& model, const ObservationData& data,
                                          const ObservationMask& mask, double alpha_reg,
                                          int cg_max = 400, double cg_tol = 1e-10,
                                          const PropagatorConfig& cfg = {},
                                          const Field* truth = nullptr);

ReconstructionResult tikhonov_reconstruct(const ObservationOperator& op,
                                          const ObservationData& data, double alpha_reg,
                                          int cg_max = 400, double cg_tol = 1e-10,
                                          const Field* truth = nullptr);

/// Time-trapezoid data norms: (L2(0,T;L2(omega)), H1 variant adding the
/// derivative channel). Throws MissingDerivative when h1 is requested
/// without the channel.
std::pair<double, double> observation_norms(const ObservationData& data);
double observation_norm_l2(const ObservationData& data);

struct SweepConfig {
    std::vector<double> noise_levels;
    std::vector<std::uint64_t> seeds;
    std::vector<double> alpha_grid;  // Morozov candidates, descending
    double morozov_factor = 1.1;
    int cg_max = 400;
    double cg_tol = 1e-8;
    bool with_derivative = true;
};

/// Noise sweep: per (level, seed) reconstruct and record the data norm of
/// the injected noise and the reconstruction error, then fit
/// error ~ C / |log eta|^alpha by least squares in (log|log eta|, log err).
/// Refuses partial observation when s <= 1/2 (no observability there).
StabilityFit stability_sweep(const OUModel& model, const ObservationMask& mask,
                             const Field& u0_truth, const std::vector<double>& times,
                             const SweepConfig& sweep, const PropagatorConfig& cfg = {});

}  // namespace ou
