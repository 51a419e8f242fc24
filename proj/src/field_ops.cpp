#include "ou/field_ops.hpp"

#include <cmath>

#include "ou/matops.hpp"
#include "ou/rng.hpp"
#include "ou/semigroup.hpp"
#include "ou/thickset.hpp"
#include "ou/transforms.hpp"

namespace ou {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

InvariantDensity invariant_density(const OUModel& model, const GridSpec& grid) {
    model.require_hurwitz("invariant_density");
    const Eigen::MatrixXd qinf = gramian_qinf(model);
    const Eigen::MatrixXd qinv = qinf.inverse();
    const int n = grid.points_per_axis;
    const int N = grid.dim;
    const double det = qinf.determinant();
    const double amp = std::pow(4.0 * kPi, -0.5 * N) / std::sqrt(det);

    InvariantDensity out;
    out.rho = Field(grid);
    if (N == 1) {
        const double c = qinv(0, 0);
        for (int j = 0; j < n; ++j) {
            const double x = grid.coord(j);
            out.rho.values[j] = amp * std::exp(-0.25 * c * x * x);
        }
    } else {
        for (int j0 = 0; j0 < n; ++j0) {
            const double x0 = grid.coord(j0);
            for (int j1 = 0; j1 < n; ++j1) {
                const double x1 = grid.coord(j1);
                const double q = qinv(0, 0) * x0 * x0 + 2.0 * qinv(0, 1) * x0 * x1 +
                                 qinv(1, 1) * x1 * x1;
                out.rho.values[grid.index(j0, j1)] = amp * std::exp(-0.25 * q);
            }
        }
    }
    double mass = 0.0;
    for (const cplx& z : out.rho.values) mass += z.real();
    out.mass = mass * grid.cell_volume();
    out.domain_too_small = std::abs(1.0 - out.mass) > 1e-6;
    return out;
}

double norm_l2(const Field& f) {
    double s = 0.0;
    for (const cplx& z : f.values) s += std::norm(z);
    return std::sqrt(s * f.grid.cell_volume());
}

double norm_l2_mu(const Field& f, const Field& rho) {
    require_same_grid(f.grid, rho.grid, "norm_l2_mu");
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        s += std::norm(f.values[i]) * rho.values[i].real();
    return std::sqrt(s * f.grid.cell_volume());
}

double norm_l2_masked(const Field& f, const ObservationMask& mask) {
    require_same_grid(f.grid, mask.grid, "norm_l2_masked");
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (mask.mask[i]) s += std::norm(f.values[i]);
    return std::sqrt(s * f.grid.cell_volume());
}

cplx inner_l2(const Field& f, const Field& g) {
    require_same_grid(f.grid, g.grid, "inner_l2");
    cplx s(0.0);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        s += std::conj(f.values[i]) * g.values[i];
    return s * f.grid.cell_volume();
}

double norm_h_s_mu(const Field& f, const OUModel& model, double s_order) {
    model.require_hurwitz("norm_h_s_mu");
    const GridSpec& g = f.grid;
    const Eigen::MatrixXd qinv = gramian_qinf(model).inverse();
    const int n = g.points_per_axis;

    Field weighted(g);
    if (g.dim == 1) {
        const double c = qinv(0, 0);
        for (int j = 0; j < n; ++j) {
            const double x = g.coord(j);
            weighted.values[j] = f.values[j] * std::exp(-0.125 * c * x * x);
        }
    } else {
        for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < n; ++j1) {
                const double x0 = g.coord(j0);
                const double x1 = g.coord(j1);
                const double q = qinv(0, 0) * x0 * x0 + 2.0 * qinv(0, 1) * x0 * x1 +
                                 qinv(1, 1) * x1 * x1;
                weighted.values[g.index(j0, j1)] = f.values[g.index(j0, j1)] *
                                                   std::exp(-0.125 * q);
            }
    }

    const SpectralField W = forward_transform(weighted);
    const int half = n / 2;
    double acc = 0.0;
    if (g.dim == 1) {
        for (int a = 0; a < n; ++a) {
            const double xi = g.freq(a - half);
            acc += std::pow(1.0 + xi * xi, s_order) * std::norm(W.coeffs[a]);
        }
    } else {
        for (int a0 = 0; a0 < n; ++a0)
            for (int a1 = 0; a1 < n; ++a1) {
                const double x0 = g.freq(a0 - half);
                const double x1 = g.freq(a1 - half);
                acc += std::pow(1.0 + x0 * x0 + x1 * x1, s_order) *
                       std::norm(W.coeffs[g.index(a0, a1)]);
            }
    }
    const double dxi = g.freq_spacing();
    const double measure = g.dim == 1 ? dxi : dxi * dxi;
    return std::sqrt(acc * measure * std::pow(kTwoPi, -g.dim));
}

Field sample_admissible(const OUModel& model, const GridSpec& grid, double eps,
                        double bound_M, std::uint64_t seed, AdmissibleMode mode) {
    if (!(eps > 0.0 && eps < 1.0))
        throw DomainError("sample_admissible: eps must lie in (0,1)");
    if (!(bound_M > 0.0))
        throw DomainError("sample_admissible: bound_M must be positive");

    const int n = grid.points_per_axis;
    const int half = n / 2;
    const int band = n / 8;  // per-axis cutoff; support well inside the box
    Rng rng(seed);

    SpectralField F(grid);
    auto amplitude = [&](double xi2) {
        return std::pow(1.0 + xi2, -0.5 * (grid.dim + 2));
    };
    // Hermitian pairs so the sample is real-valued.
    if (grid.dim == 1) {
        F.coeffs[half] = amplitude(0.0) * rng.gaussian();
        for (int k = 1; k <= band; ++k) {
            const double xi = grid.freq(k);
            const double a = amplitude(xi * xi);
            const cplx c = a * cplx(rng.gaussian(), rng.gaussian());
            F.coeffs[half + k] = c;
            F.coeffs[half - k] = std::conj(c);
        }
    } else {
        for (int k0 = -band; k0 <= band; ++k0)
            for (int k1 = -band; k1 <= band; ++k1) {
                if (k0 < 0 || (k0 == 0 && k1 < 0)) continue;  // mirror handles these
                const double x0 = grid.freq(k0);
                const double x1 = grid.freq(k1);
                const double a = amplitude(x0 * x0 + x1 * x1);
                cplx c = a * cplx(rng.gaussian(), rng.gaussian());
                if (k0 == 0 && k1 == 0) c = cplx(c.real(), 0.0);
                F.coeffs[grid.index(half + k0, half + k1)] = c;
                F.coeffs[grid.index(half - k0, half - k1)] = std::conj(c);
            }
    }

    Field f = inverse_transform(F);

    // Gaussian envelope: exp(-24 (x/L)^2) per axis keeps the boundary below
    // 1e-8 of the peak (with margin for draws whose peak sits off-center)
    // while leaving the low-mode spectrum essentially intact.
    const double alpha = 24.0;
    const double L = grid.half_width;
    if (grid.dim == 1) {
        for (int j = 0; j < n; ++j) {
            const double x = grid.coord(j) / L;
            f.values[j] *= std::exp(-alpha * x * x);
        }
    } else {
        for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < n; ++j1) {
                const double x0 = grid.coord(j0) / L;
                const double x1 = grid.coord(j1) / L;
                f.values[grid.index(j0, j1)] *= std::exp(-alpha * (x0 * x0 + x1 * x1));
            }
    }

    double norm = 0.0;
    if (mode == AdmissibleMode::weighted) {
        norm = norm_h_s_mu(f, model, 2.0 * eps);
    } else {
        const Field gen = apply_generator(model, f);
        norm = norm_l2(f) + norm_l2(gen);
    }
    if (norm <= 0.0) throw DomainError("sample_admissible: degenerate draw");
    const double scale = bound_M / norm;
    for (cplx& z : f.values) z *= scale;
    return f;
}

double auto_half_width(const OUModel& model, double T) {
    double sigma_inf = 0.0;
    if (model.hurwitz()) {
        const Eigen::MatrixXd qinf = gramian_qinf(model);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qinf);
        sigma_inf = std::sqrt(es.eigenvalues().maxCoeff());
    }
    const double qn = spectral_norm(model.Q());
    const double diffusive = std::sqrt(2.0 * T * std::pow(qn, 1.0 / (2.0 * model.s())) + 1.0);
    const double L = 8.0 * std::max(sigma_inf, diffusive);
    return std::ceil(L * 10.0 - 1e-9) / 10.0;
}

}  // namespace ou
