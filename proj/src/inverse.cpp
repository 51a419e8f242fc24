#include "ou/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ou/parallel.hpp"
#include "ou/rng.hpp"

namespace ou {

namespace {

void validate_times(const std::vector<double>& times) {
    if (times.empty()) throw DomainError("observation: need at least one time");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0)) throw DomainError("observation: times must be positive");
        if (i > 0 && times[i] < times[i - 1])
            throw DomainError("observation: times must be sorted");
    }
}

// Midpoint-cell weights covering (0, t_m]: trapezoid with a virtual node at
// zero carrying the first sample.
std::vector<double> time_weights(const std::vector<double>& times) {
    const std::size_t m = times.size();
    std::vector<double> w(m);
    if (m == 1) {
        w[0] = times[0];
        return w;
    }
    w[0] = 0.5 * (times[0] + times[1]);
    for (std::size_t i = 1; i + 1 < m; ++i) w[i] = 0.5 * (times[i + 1] - times[i - 1]);
    w[m - 1] = 0.5 * (times[m - 1] - times[m - 2]);
    return w;
}

double stacked_sq(const std::vector<Field>& fs) {
    double s = 0.0;
    for (const Field& f : fs)
        for (const cplx& z : f.values) s += std::norm(z);
    return s;
}

}  // namespace

ObservationOperator::ObservationOperator(const OUModel& model, const GridSpec& grid,
                                         const ObservationMask& mask,
                                         std::vector<double> times,
                                         const PropagatorConfig& cfg)
    : grid_(grid), mask_(mask), times_(std::move(times)), cfg_(cfg) {
    validate_times(times_);
    require_same_grid(mask_.grid, grid_, "observation mask");
    props_.reserve(times_.size());
    for (double t : times_) props_.emplace_back(model, grid_, t, cfg_);
}

std::vector<Field> ObservationOperator::apply(const Field& u0) const {
    require_same_grid(u0.grid, grid_, "observe");
    const TapGrid interp = props_.front().make_interpolant(u0);
    std::vector<Field> out;
    out.reserve(props_.size());
    for (const auto& prop : props_) out.push_back(restrict_to(prop.apply(interp), mask_));
    return out;
}

Field ObservationOperator::apply_adjoint(const std::vector<Field>& data) const {
    if (data.size() != props_.size())
        throw GridMismatch("observe adjoint: snapshot count mismatch");
    std::vector<cplx> fine;
    for (std::size_t i = 0; i < props_.size(); ++i)
        props_[i].scatter_adjoint(restrict_to(data[i], mask_), fine);
    TapGrid adj;
    adj.dim = grid_.dim;
    adj.n = grid_.points_per_axis * cfg_.upsample;
    adj.kind = cfg_.interp;
    adj.coef = std::move(fine);
    return frequency_interpolant_adjoint(adj, grid_, cfg_.upsample, cfg_.interp);
}

ObservationData forward_observe(const OUModel& model, const Field& u0,
                                const ObservationMask& mask,
                                const std::vector<double>& times,
                                const PropagatorConfig& cfg, bool with_derivative) {
    ObservationOperator op(model, u0.grid, mask, times, cfg);
    ObservationData data;
    data.times = times;
    data.snapshots = op.apply(u0);
    if (with_derivative) {
        const Field z0 = apply_generator(model, u0);
        data.derivative_snapshots = op.apply(z0);
    }
    return data;
}

ObservationData add_noise(const ObservationData& data, const ObservationMask& mask,
                          double level, std::uint64_t seed) {
    if (level < 0.0) throw DomainError("add_noise: level must be nonnegative");
    ObservationData out = data;
    out.noise_level = level;
    out.seed = seed;
    if (level == 0.0) return out;

    Rng rng(seed);
    const std::vector<double> w = time_weights(data.times);

    auto perturb_channel = [&](std::vector<Field>& channel) {
        if (channel.empty()) return;
        std::vector<Field> noise;
        noise.reserve(channel.size());
        double clean_sq = 0.0, noise_sq = 0.0;
        const double vol = channel.front().grid.cell_volume();
        for (std::size_t i = 0; i < channel.size(); ++i) {
            Field nf(channel[i].grid);
            for (std::size_t j = 0; j < nf.values.size(); ++j) {
                if (!mask.mask[j]) continue;
                nf.values[j] = cplx(rng.gaussian(), 0.0);
                noise_sq += w[i] * std::norm(nf.values[j]) * vol;
            }
            for (std::size_t j = 0; j < nf.values.size(); ++j)
                if (mask.mask[j]) clean_sq += w[i] * std::norm(channel[i].values[j]) * vol;
            noise.push_back(std::move(nf));
        }
        if (noise_sq == 0.0) return;
        const double scale = level * std::sqrt(clean_sq / noise_sq);
        for (std::size_t i = 0; i < channel.size(); ++i)
            for (std::size_t j = 0; j < channel[i].values.size(); ++j)
                channel[i].values[j] += scale * noise[i].values[j];
    };

    perturb_channel(out.snapshots);
    perturb_channel(out.derivative_snapshots);
    return out;
}

Field adjoint_observe(const OUModel& model, const ObservationData& data,
                      const ObservationMask& mask, const PropagatorConfig& cfg) {
    if (data.snapshots.empty()) throw DomainError("adjoint_observe: empty data");
    ObservationOperator op(model, data.snapshots.front().grid, mask, data.times, cfg);
    return op.apply_adjoint(data.snapshots);
}

ReconstructionResult tikhonov_reconstruct(const ObservationOperator& op,
                                          const ObservationData& data, double alpha_reg,
                                          int cg_max, double cg_tol, const Field* truth) {
    if (!(alpha_reg > 0.0)) throw DomainError("tikhonov: alpha_reg must be positive");
    const GridSpec& grid = op.grid();
    const double sqrt_alpha = std::sqrt(alpha_reg);
    const double vol_root = std::sqrt(grid.cell_volume());

    // CGLS on the stacked operator [F; sqrt(alpha) I] with rhs [d; 0]; the
    // stacked residual it records decreases monotonically.
    Field x(grid);
    std::vector<Field> rd = data.snapshots;    // data-space residual d - F x
    Field rr(grid);                            // regularizer residual -sqrt(a) x
    Field s = op.apply_adjoint(rd);            // normal residual F* rd + sqrt(a) rr

    auto field_sq = [](const Field& a) {
        double acc = 0.0;
        for (const cplx& z : a.values) acc += std::norm(z);
        return acc;
    };

    ReconstructionResult result;
    result.alpha_reg = alpha_reg;
    const double s0_norm = std::sqrt(field_sq(s));
    double residual = std::sqrt(stacked_sq(rd) + field_sq(rr));
    result.residual_history.push_back(residual * vol_root);
    if (s0_norm == 0.0) {
        result.u0_hat = x;
        result.converged = true;
        if (truth) {
            const double tn = norm_l2(*truth);
            result.relative_error = tn > 0.0 ? norm_l2(*truth) / tn : 0.0;
        }
        return result;
    }

    Field p = s;
    double gamma = field_sq(s);
    for (int it = 0; it < cg_max; ++it) {
        const std::vector<Field> qd = op.apply(p);
        double delta = stacked_sq(qd) + alpha_reg * field_sq(p);
        if (delta <= 0.0) break;
        const double step = gamma / delta;
        for (std::size_t i = 0; i < x.values.size(); ++i) x.values[i] += step * p.values[i];
        for (std::size_t i = 0; i < rd.size(); ++i)
            for (std::size_t j = 0; j < rd[i].values.size(); ++j)
                rd[i].values[j] -= step * qd[i].values[j];
        for (std::size_t i = 0; i < rr.values.size(); ++i)
            rr.values[i] -= step * sqrt_alpha * p.values[i];

        s = op.apply_adjoint(rd);
        for (std::size_t i = 0; i < s.values.size(); ++i)
            s.values[i] += sqrt_alpha * rr.values[i];

        residual = std::sqrt(stacked_sq(rd) + field_sq(rr));
        result.residual_history.push_back(residual * vol_root);
        result.cg_iterations = it + 1;

        const double gamma_new = field_sq(s);
        if (std::sqrt(gamma_new) <= cg_tol * s0_norm) {
            result.converged = true;
            gamma = gamma_new;
            break;
        }
        const double beta = gamma_new / gamma;
        gamma = gamma_new;
        for (std::size_t i = 0; i < p.values.size(); ++i)
            p.values[i] = s.values[i] + beta * p.values[i];
    }
    result.final_normal_residual = std::sqrt(gamma) / s0_norm;
    result.u0_hat = std::move(x);
    if (truth) {
        const double tn = norm_l2(*truth);
        Field diff = result.u0_hat;
        for (std::size_t i = 0; i < diff.values.size(); ++i)
            diff.values[i] -= truth->values[i];
        result.relative_error = tn > 0.0 ? norm_l2(diff) / tn : norm_l2(diff);
    }
    return result;
}

ReconstructionResult tikhonov_reconstruct(const OUModel& model, const ObservationData& data,
                                          const ObservationMask& mask, double alpha_reg,
                                          int cg_max, double cg_tol,
                                          const PropagatorConfig& cfg, const Field* truth) {
    if (data.snapshots.empty()) throw DomainError("tikhonov: empty data");
    ObservationOperator op(model, data.snapshots.front().grid, mask, data.times, cfg);
    return tikhonov_reconstruct(op, data, alpha_reg, cg_max, cg_tol, truth);
}

double observation_norm_l2(const ObservationData& data) {
    const std::vector<double> w = time_weights(data.times);
    double acc = 0.0;
    for (std::size_t i = 0; i < data.snapshots.size(); ++i) {
        const double n = norm_l2(data.snapshots[i]);
        acc += w[i] * n * n;
    }
    return std::sqrt(acc);
}

std::pair<double, double> observation_norms(const ObservationData& data) {
    const double l2 = observation_norm_l2(data);
    if (data.derivative_snapshots.empty())
        throw MissingDerivative("observation_norms: derivative channel absent");
    const std::vector<double> w = time_weights(data.times);
    double acc = l2 * l2;
    for (std::size_t i = 0; i < data.derivative_snapshots.size(); ++i) {
        const double n = norm_l2(data.derivative_snapshots[i]);
        acc += w[i] * n * n;
    }
    return {l2, std::sqrt(acc)};
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

StabilityFit stability_sweep(const OUModel& model, const ObservationMask& mask,
                             const Field& u0_truth, const std::vector<double>& times,
                             const SweepConfig& sweep, const PropagatorConfig& cfg) {
    const bool full = mask.count() == mask.mask.size();
    if (model.s() <= 0.5 && !full)
        throw RegimeRefused(
            "stability_sweep: s <= 1/2 with partial observation lies outside the "
            "observability regime");
    if (sweep.noise_levels.empty() || sweep.seeds.empty())
        throw DomainError("stability_sweep: need noise levels and seeds");
    if (sweep.alpha_grid.empty())
        throw DomainError("stability_sweep: need a regularization grid");

    ObservationOperator op(model, u0_truth.grid, mask, times, cfg);
    ObservationData clean;
    clean.times = times;
    clean.snapshots = op.apply(u0_truth);
    if (sweep.with_derivative) {
        const Field z0 = apply_generator(model, u0_truth);
        clean.derivative_snapshots = op.apply(z0);
    }

    std::vector<double> alphas = sweep.alpha_grid;
    std::sort(alphas.begin(), alphas.end(), std::greater<double>());

    const std::size_t n_runs = sweep.noise_levels.size() * sweep.seeds.size();
    StabilityFit fit;
    fit.noise_levels = sweep.noise_levels;
    fit.runs.resize(n_runs);

    const double truth_norm = norm_l2(u0_truth);
    parallel_for(n_runs, [&](std::size_t run) {
        const std::size_t li = run / sweep.seeds.size();
        const std::size_t si = run % sweep.seeds.size();
        const double level = sweep.noise_levels[li];
        const std::uint64_t seed = sweep.seeds[si];

        const ObservationData noisy = add_noise(clean, mask, level, seed);

        // Measured data norms of the injected noise.
        ObservationData noise_only = noisy;
        for (std::size_t i = 0; i < noise_only.snapshots.size(); ++i)
            for (std::size_t j = 0; j < noise_only.snapshots[i].values.size(); ++j)
                noise_only.snapshots[i].values[j] -= clean.snapshots[i].values[j];
        for (std::size_t i = 0; i < noise_only.derivative_snapshots.size(); ++i)
            for (std::size_t j = 0; j < noise_only.derivative_snapshots[i].values.size(); ++j)
                noise_only.derivative_snapshots[i].values[j] -=
                    clean.derivative_snapshots[i].values[j];
        const double eta_l2 = observation_norm_l2(noise_only);
        const double eta_h1 = noise_only.derivative_snapshots.empty()
                                  ? std::numeric_limits<double>::quiet_NaN()
                                  : observation_norms(noise_only).second;
        const double noise_stacked = std::sqrt(stacked_sq(noise_only.snapshots));

        // Morozov discrepancy rule: largest alpha whose data residual stays
        // within morozov_factor of the measured noise norm.
        ReconstructionResult chosen;
        bool have = false;
        for (double alpha : alphas) {
            ReconstructionResult r =
                tikhonov_reconstruct(op, noisy, alpha, sweep.cg_max, sweep.cg_tol, &u0_truth);
            std::vector<Field> fd = op.apply(r.u0_hat);
            double res_sq = 0.0;
            for (std::size_t i = 0; i < fd.size(); ++i)
                for (std::size_t j = 0; j < fd[i].values.size(); ++j)
                    res_sq += std::norm(noisy.snapshots[i].values[j] - fd[i].values[j]);
            const double discrepancy = std::sqrt(res_sq);
            chosen = std::move(r);
            have = true;
            if (level == 0.0 || discrepancy <= sweep.morozov_factor * noise_stacked) break;
        }
        if (!have) throw ConvergenceError("stability_sweep: no reconstruction produced");

        StabilityFit::Run& rec = fit.runs[run];
        rec.level = level;
        rec.seed = seed;
        rec.eta_l2 = eta_l2;
        rec.eta_h1 = eta_h1;
        rec.error = truth_norm > 0.0 ? chosen.relative_error : norm_l2(chosen.u0_hat);
        rec.alpha_reg = chosen.alpha_reg;
        rec.cg_iterations = chosen.cg_iterations;
    });

    // Per-level medians, then the log-log fit.
    fit.data_norms.resize(sweep.noise_levels.size());
    fit.recon_errors.resize(sweep.noise_levels.size());
    for (std::size_t li = 0; li < sweep.noise_levels.size(); ++li) {
        std::vector<double> etas, errs;
        for (std::size_t si = 0; si < sweep.seeds.size(); ++si) {
            const auto& rec = fit.runs[li * sweep.seeds.size() + si];
            etas.push_back(sweep.with_derivative ? rec.eta_h1 : rec.eta_l2);
            errs.push_back(rec.error);
        }
        fit.data_norms[li] = median(etas);
        fit.recon_errors[li] = median(errs);
    }

    std::vector<double> xs, ys;
    for (std::size_t li = 0; li < fit.data_norms.size(); ++li) {
        const double eta = fit.data_norms[li];
        const double err = fit.recon_errors[li];
        if (!(eta > 0.0) || !(err > 0.0) || eta >= 1.0) continue;
        xs.push_back(std::log(std::abs(std::log(eta))));
        ys.push_back(std::log(err));
    }
    const double spread =
        xs.empty() ? 0.0
                   : *std::max_element(xs.begin(), xs.end()) -
                         *std::min_element(xs.begin(), xs.end());
    if (xs.size() >= 2 && spread > 1e-12) {
        const double n = static_cast<double>(xs.size());
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
        double sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
            syy += (ys[i] - my) * (ys[i] - my);
        }
        const double slope = sxy / sxx;
        fit.fitted_alpha = -slope;
        fit.fitted_C = std::exp(my - slope * mx);
        double ss_res = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double pred = my + slope * (xs[i] - mx);
            ss_res += (ys[i] - pred) * (ys[i] - pred);
        }
        fit.fit_r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    }
    return fit;
}

}  // namespace ou
