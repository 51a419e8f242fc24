#include "ou/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "ou/matops.hpp"
#include "ou/parallel.hpp"
#include "ou/transforms.hpp"

namespace ou {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kBoundaryDecay = 1e-8;

void require_boundary_decay(const Field& f, const char* what) {
    if (boundary_decay_ratio(f) > kBoundaryDecay)
        throw DomainTooSmall(std::string(what) +
                             ": field does not decay below 1e-8 at the grid boundary");
}

// ---- Gauss-Legendre rules -------------------------------------------------

struct GaussRule {
    std::vector<double> node;    // on [-1, 1]
    std::vector<double> weight;
};

GaussRule gauss_legendre(int m) {
    GaussRule r;
    r.node.resize(m);
    r.weight.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = m * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.node[i] = -x;
        r.node[m - 1 - i] = x;
        r.weight[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weight[m - 1 - i] = r.weight[i];
    }
    return r;
}

const GaussRule& cached_gauss(int m) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, gauss_legendre(m)).first;
    return it->second;
}

// ---- symbol integrand -----------------------------------------------------

double symbol_value(const OUModel& model, double tau, const Eigen::VectorXd& xi,
                    double sign) {
    const Eigen::VectorXd w = expm(model.B(), sign * tau).transpose() * xi;
    return std::pow(w.dot(model.Q() * w), model.s());
}

double adaptive_symbol(const OUModel& model, const Eigen::VectorXd& xi, double sign,
                       double a, double b, double fa, double fm, double fb, double whole,
                       double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double fl = symbol_value(model, 0.5 * (a + m), xi, sign);
    const double fr = symbol_value(model, 0.5 * (m + b), xi, sign);
    const double left = (m - a) / 6.0 * (fa + 4.0 * fl + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * fr + fb);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
    if (depth <= 0)
        throw ConvergenceError("symbol integral: refinement cap reached before tolerance");
    return adaptive_symbol(model, xi, sign, a, m, fa, fl, fm, left, 0.5 * tol, depth - 1) +
           adaptive_symbol(model, xi, sign, m, b, fm, fr, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double symbol_integral(const OUModel& model, double t, const double* xi_raw, double tol,
                       SymbolDirection dir) {
    if (t < 0.0) throw DomainError("symbol_integral: t must be nonnegative");
    if (t == 0.0) return 0.0;
    Eigen::VectorXd xi(model.dim());
    for (int d = 0; d < model.dim(); ++d) xi(d) = xi_raw[d];
    if (xi.norm() == 0.0) return 0.0;

    const double sign = dir == SymbolDirection::forward ? -1.0 : 1.0;
    const double fa = symbol_value(model, 0.0, xi, sign);
    const double fb = symbol_value(model, t, xi, sign);
    const double fm = symbol_value(model, 0.5 * t, xi, sign);
    const double whole = t / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_symbol(model, xi, sign, 0.0, t, fa, fm, fb, whole, tol, 48);
}

std::vector<double> symbol_integral_grid(const OUModel& model, double t,
                                         const GridSpec& grid, double tol,
                                         SymbolDirection dir) {
    const int n = grid.points_per_axis;
    const int half = n / 2;
    std::vector<double> out(grid.size(), 0.0);
    if (t == 0.0) return out;
    const double sign = dir == SymbolDirection::forward ? -1.0 : 1.0;
    const double s = model.s();
    const Eigen::MatrixXd& Q = model.Q();

    auto evaluate = [&](int panels, std::vector<double>& acc) {
        std::fill(acc.begin(), acc.end(), 0.0);
        const GaussRule& rule = cached_gauss(24);
        const double width = t / panels;
        for (int p = 0; p < panels; ++p) {
            const double t0 = p * width;
            for (std::size_t q = 0; q < rule.node.size(); ++q) {
                const double tau = t0 + 0.5 * width * (rule.node[q] + 1.0);
                const double gw = 0.5 * width * rule.weight[q];
                const Eigen::MatrixXd E = expm(model.B(), sign * tau).transpose();
                // M = E^T Q E so the quadratic form is xi^T M xi
                const Eigen::MatrixXd M = E.transpose() * Q * E;
                if (grid.dim == 1) {
                    const double m00 = M(0, 0);
                    for (int a = 0; a < n; ++a) {
                        const double xi = grid.freq(a - half);
                        acc[a] += gw * std::pow(m00 * xi * xi, s);
                    }
                } else {
                    const double m00 = M(0, 0), m01 = M(0, 1), m11 = M(1, 1);
                    for (int a0 = 0; a0 < n; ++a0) {
                        const double x0 = grid.freq(a0 - half);
                        for (int a1 = 0; a1 < n; ++a1) {
                            const double x1 = grid.freq(a1 - half);
                            const double quad =
                                m00 * x0 * x0 + 2.0 * m01 * x0 * x1 + m11 * x1 * x1;
                            if (quad > 0.0)
                                acc[grid.index(a0, a1)] += gw * std::pow(quad, s);
                        }
                    }
                }
            }
        }
    };

    int panels = std::max(1, static_cast<int>(std::ceil(t * spectral_norm(model.B()))));
    std::vector<double> coarse(out.size()), fine(out.size());
    evaluate(panels, coarse);
    for (int round = 0; round < 7; ++round) {
        evaluate(2 * panels, fine);
        double diff = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            diff = std::max(diff, std::abs(fine[i] - coarse[i]));
            scale = std::max(scale, std::abs(fine[i]));
        }
        if (diff <= tol * scale) {
            return fine;
        }
        panels *= 2;
        coarse.swap(fine);
    }
    throw ConvergenceError("symbol integral grid: panel cap reached before tolerance");
}

// ---- Fourier propagator ---------------------------------------------------

FourierPropagator::FourierPropagator(const OUModel& model, const GridSpec& grid, double t,
                                     const PropagatorConfig& cfg)
    : grid_(grid), t_(t), cfg_(cfg) {
    if (t < 0.0) throw DomainError("propagate: t must be nonnegative");
    if (model.dim() != grid.dim) throw GridMismatch("propagate: model/grid dimension");
    if (cfg_.upsample < 1 || (cfg_.upsample & (cfg_.upsample - 1)) != 0)
        throw ConfigError("PropagatorConfig: upsample must be a power of two");
    if (cfg_.kernel_quad_points < 8)
        throw ConfigError("PropagatorConfig: kernel_quad_points must be >= 8");
    if (!(cfg_.quad_tol > 0.0)) throw ConfigError("PropagatorConfig: quad_tol must be > 0");

    trace_factor_ = std::exp(-model.trace_B() * t);
    warp_ = expm(model.B(), -t).transpose();
    fine_n_ = grid.points_per_axis * cfg_.upsample;

    const std::vector<double> symbol =
        symbol_integral_grid(model, t, grid, cfg_.quad_tol, SymbolDirection::forward);
    multiplier_.resize(symbol.size());
    for (std::size_t i = 0; i < symbol.size(); ++i)
        multiplier_[i] = trace_factor_ * std::exp(-symbol[i]);

    // Geometry-only tap grid for stencil computation.
    TapGrid geom;
    geom.dim = grid.dim;
    geom.n = fine_n_;
    geom.step = grid.freq_spacing() / cfg_.upsample;
    geom.origin = -(fine_n_ / 2) * geom.step;
    geom.kind = cfg_.interp;

    const int n = grid.points_per_axis;
    const int half = n / 2;
    const double xi_max = half * grid.freq_spacing();
    taps_.resize(grid.size());
    inside_.assign(grid.size(), 0);
    if (grid.dim == 1) {
        for (int a = 0; a < n; ++a) {
            const double xi = grid.freq(a - half);
            const double eta = warp_(0, 0) * xi;
            if (std::abs(eta) <= xi_max) {
                inside_[a] = 1;
                geom.taps(&eta, taps_[a]);
            }
        }
    } else {
        for (int a0 = 0; a0 < n; ++a0)
            for (int a1 = 0; a1 < n; ++a1) {
                const double xi0 = grid_.freq(a0 - half);
                const double xi1 = grid_.freq(a1 - half);
                const double eta[2] = {warp_(0, 0) * xi0 + warp_(0, 1) * xi1,
                                       warp_(1, 0) * xi0 + warp_(1, 1) * xi1};
                const std::size_t idx = grid_.index(a0, a1);
                if (std::abs(eta[0]) <= xi_max && std::abs(eta[1]) <= xi_max) {
                    inside_[idx] = 1;
                    geom.taps(eta, taps_[idx]);
                }
            }
    }
}

TapGrid FourierPropagator::make_interpolant(const Field& u0) const {
    require_same_grid(u0.grid, grid_, "propagate");
    return build_frequency_interpolant(u0, cfg_.upsample, cfg_.interp);
}

Field FourierPropagator::apply(const TapGrid& interp) const {
    SpectralField out(grid_);
    const int mask = fine_n_ - 1;  // fine_n_ is a power of two
    for (std::size_t idx = 0; idx < out.coeffs.size(); ++idx) {
        if (!inside_[idx]) continue;
        const InterpTaps& t = taps_[idx];
        cplx acc(0.0);
        if (grid_.dim == 1) {
            for (int i = 0; i < t.count; ++i)
                acc += t.w0[i] * interp.coef[(t.base[0] + i + fine_n_) & mask];
        } else {
            for (int i = 0; i < t.count; ++i) {
                const std::size_t r =
                    static_cast<std::size_t>((t.base[0] + i + fine_n_) & mask) * fine_n_;
                cplx row(0.0);
                for (int j = 0; j < t.count; ++j)
                    row += t.w1[j] * interp.coef[r + ((t.base[1] + j + fine_n_) & mask)];
                acc += t.w0[i] * row;
            }
        }
        out.coeffs[idx] = multiplier_[idx] * acc;
    }
    return inverse_transform(out);
}

Field FourierPropagator::apply(const Field& u0, PropagateDiagnostics* diag) const {
    require_same_grid(u0.grid, grid_, "propagate");
    require_boundary_decay(u0, "propagate_fourier");
    const TapGrid interp = make_interpolant(u0);
    Field out = apply(interp);

    if (diag) {
        diag->frequency_box_exceeded = false;
        diag->out_of_box_mass_fraction = 0.0;
        // Grid samples cannot see beyond the box (everything aliases back),
        // so the dropped mass is estimated from the periodic fold of the
        // warped read, weighted by the multiplier: the share of output
        // energy the truncation would have produced.
        const int n = grid_.points_per_axis;
        const int half = n / 2;
        const double width = 2.0 * half * grid_.freq_spacing();
        auto fold = [&](double x) {
            double y = std::fmod(x + half * grid_.freq_spacing(), width);
            if (y < 0.0) y += width;
            return y - half * grid_.freq_spacing();
        };
        double total = 0.0, dropped = 0.0;
        for (std::size_t idx = 0; idx < inside_.size(); ++idx) {
            double eta[2] = {0.0, 0.0};
            if (grid_.dim == 1) {
                eta[0] = warp_(0, 0) * grid_.freq(static_cast<int>(idx) - half);
            } else {
                const double xi0 = grid_.freq(static_cast<int>(idx) / n - half);
                const double xi1 = grid_.freq(static_cast<int>(idx % n) - half);
                eta[0] = warp_(0, 0) * xi0 + warp_(0, 1) * xi1;
                eta[1] = warp_(1, 0) * xi0 + warp_(1, 1) * xi1;
            }
            if (!inside_[idx]) {
                eta[0] = fold(eta[0]);
                eta[1] = grid_.dim == 2 ? fold(eta[1]) : 0.0;
            }
            const double mass = std::norm(multiplier_[idx] * interp.value(eta));
            total += mass;
            if (!inside_[idx]) dropped += mass;
        }
        if (total > 0.0) {
            diag->out_of_box_mass_fraction = dropped / total;
            diag->frequency_box_exceeded = diag->out_of_box_mass_fraction > 0.01;
        }
    }
    return out;
}

void FourierPropagator::scatter_adjoint(const Field& v, std::vector<cplx>& fine_accum) const {
    require_same_grid(v.grid, grid_, "propagate adjoint");
    const int n = grid_.points_per_axis;
    const std::size_t fine_size =
        grid_.dim == 1 ? static_cast<std::size_t>(fine_n_)
                       : static_cast<std::size_t>(fine_n_) * fine_n_;
    if (fine_accum.size() != fine_size) fine_accum.assign(fine_size, cplx(0.0));

    // Conjugate transpose of inverse_transform: forward DFT with the
    // inverse's 1/(nh)^N scale.
    std::vector<cplx> buf = v.values;
    dft_inplace(buf, grid_.dim, n, -1);
    std::vector<cplx> c_adj(buf.size());
    centered_from_raw(buf, c_adj, grid_.dim, n, 1.0 / (grid_.cell_volume() * grid_.size()));

    // Diagonal multiplier is real, then scatter through the tap stencils.
    const int mask = fine_n_ - 1;
    for (std::size_t idx = 0; idx < c_adj.size(); ++idx) {
        if (!inside_[idx]) continue;
        const cplx w = multiplier_[idx] * c_adj[idx];
        const InterpTaps& t = taps_[idx];
        if (grid_.dim == 1) {
            for (int i = 0; i < t.count; ++i)
                fine_accum[(t.base[0] + i + fine_n_) & mask] += t.w0[i] * w;
        } else {
            for (int i = 0; i < t.count; ++i) {
                const std::size_t r =
                    static_cast<std::size_t>((t.base[0] + i + fine_n_) & mask) * fine_n_;
                for (int j = 0; j < t.count; ++j)
                    fine_accum[r + ((t.base[1] + j + fine_n_) & mask)] +=
                        t.w0[i] * t.w1[j] * w;
            }
        }
    }
}

Field FourierPropagator::apply_adjoint(const Field& v) const {
    TapGrid adj;
    adj.dim = grid_.dim;
    adj.n = fine_n_;
    adj.kind = cfg_.interp;
    scatter_adjoint(v, adj.coef);
    return frequency_interpolant_adjoint(adj, grid_, cfg_.upsample, cfg_.interp);
}

Field propagate_fourier(const OUModel& model, const Field& u0, double t,
                        const PropagatorConfig& cfg, PropagateDiagnostics* diag) {
    if (t == 0.0) {
        require_boundary_decay(u0, "propagate_fourier");
        return u0;
    }
    FourierPropagator prop(model, u0.grid, t, cfg);
    return prop.apply(u0, diag);
}

// ---- Kolmogorov propagator ------------------------------------------------

Field propagate_kolmogorov(const OUModel& model, const Field& u0, double t,
                           const PropagatorConfig& cfg) {
    if (std::abs(model.s() - 1.0) > 1e-12)
        throw FractionalUnsupported("propagate_kolmogorov: kernel formula requires s = 1");
    if (t < 0.0) throw DomainError("propagate_kolmogorov: t must be nonnegative");
    if (model.dim() != u0.grid.dim)
        throw GridMismatch("propagate_kolmogorov: model/grid dimension");
    if (t == 0.0) return u0;

    const GridSpec& g = u0.grid;
    const int N = g.dim;
    const Eigen::MatrixXd Qt = gramian_qt(model, t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Qt);
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::MatrixXd V = es.eigenvectors();
    if (lam.minCoeff() <= 0.0)
        throw DomainError("propagate_kolmogorov: kernel covariance not positive definite");

    const double prefactor =
        std::pow(4.0 * kPi, -0.5 * N) / std::sqrt(Qt.determinant());
    const GaussRule& rule = cached_gauss(cfg.kernel_quad_points);
    const int m = cfg.kernel_quad_points;

    // Per-axis nodes on +-8 sigma of the kernel (sigma_i = sqrt(2 lambda_i)),
    // with the Gaussian folded into the weights.
    std::vector<std::vector<double>> z(N), w(N);
    for (int d = 0; d < N; ++d) {
        const double sigma = std::sqrt(2.0 * lam(d));
        const double halfw = 8.0 * sigma;
        z[d].resize(m);
        w[d].resize(m);
        for (int q = 0; q < m; ++q) {
            z[d][q] = halfw * rule.node[q];
            w[d][q] = halfw * rule.weight[q] * std::exp(-z[d][q] * z[d][q] / (4.0 * lam(d)));
        }
    }

    const TapGrid interp = build_spatial_interpolant(u0, cfg.upsample, cfg.interp);
    const Eigen::MatrixXd E = expm(model.B(), t);
    Field out(g);
    const int n = g.points_per_axis;

    if (N == 1) {
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
            const double c = E(0, 0) * g.coord(static_cast<int>(j));
            cplx acc(0.0);
            for (int q = 0; q < m; ++q) {
                const double pt = c - z[0][q];
                acc += w[0][q] * interp.value(&pt);
            }
            out.values[j] = prefactor * acc;
        });
    } else {
        // Precompute the rotated offsets y = V z once.
        std::vector<double> y0(static_cast<std::size_t>(m) * m), y1(y0.size());
        for (int q0 = 0; q0 < m; ++q0)
            for (int q1 = 0; q1 < m; ++q1) {
                y0[static_cast<std::size_t>(q0) * m + q1] =
                    V(0, 0) * z[0][q0] + V(0, 1) * z[1][q1];
                y1[static_cast<std::size_t>(q0) * m + q1] =
                    V(1, 0) * z[0][q0] + V(1, 1) * z[1][q1];
            }
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t j0) {
            const double x0 = g.coord(static_cast<int>(j0));
            for (int j1 = 0; j1 < n; ++j1) {
                const double x1 = g.coord(j1);
                const double c0 = E(0, 0) * x0 + E(0, 1) * x1;
                const double c1 = E(1, 0) * x0 + E(1, 1) * x1;
                cplx acc(0.0);
                for (int q0 = 0; q0 < m; ++q0) {
                    const double w0 = w[0][q0];
                    cplx inner(0.0);
                    const std::size_t row = static_cast<std::size_t>(q0) * m;
                    for (int q1 = 0; q1 < m; ++q1) {
                        const double pt[2] = {c0 - y0[row + q1], c1 - y1[row + q1]};
                        inner += w[1][q1] * interp.value(pt);
                    }
                    acc += w0 * inner;
                }
                out.values[g.index(static_cast<int>(j0), j1)] = prefactor * acc;
            }
        });
    }
    return out;
}

// ---- generator ------------------------------------------------------------

Field apply_generator(const OUModel& model, const Field& u0) {
    if (model.dim() != u0.grid.dim) throw GridMismatch("apply_generator");
    require_boundary_decay(u0, "apply_generator");
    const GridSpec& g = u0.grid;
    const int n = g.points_per_axis;
    const int half = n / 2;
    const double s = model.s();
    const Eigen::MatrixXd& Q = model.Q();
    const Eigen::MatrixXd& B = model.B();

    const SpectralField F = forward_transform(u0);

    // Fractional diffusion: multiplier -<Q xi, xi>^s.
    SpectralField frac(g);
    SpectralField grad0(g), grad1(g);
    if (g.dim == 1) {
        for (int a = 0; a < n; ++a) {
            const double xi = g.freq(a - half);
            const double quad = Q(0, 0) * xi * xi;
            frac.coeffs[a] = -std::pow(quad, s) * F.coeffs[a];
            grad0.coeffs[a] = cplx(0.0, xi) * F.coeffs[a];
        }
    } else {
        for (int a0 = 0; a0 < n; ++a0)
            for (int a1 = 0; a1 < n; ++a1) {
                const double x0 = g.freq(a0 - half);
                const double x1 = g.freq(a1 - half);
                const double quad =
                    Q(0, 0) * x0 * x0 + 2.0 * Q(0, 1) * x0 * x1 + Q(1, 1) * x1 * x1;
                const std::size_t i = g.index(a0, a1);
                frac.coeffs[i] = (quad > 0.0 ? -std::pow(quad, s) : 0.0) * F.coeffs[i];
                grad0.coeffs[i] = cplx(0.0, x0) * F.coeffs[i];
                grad1.coeffs[i] = cplx(0.0, x1) * F.coeffs[i];
            }
    }

    const Field diff = inverse_transform(frac);
    const Field g0 = inverse_transform(grad0);
    Field g1;
    if (g.dim == 2) g1 = inverse_transform(grad1);

    // Cosine taper on the outer 5% of the box; the drift coefficient Bx is
    // incompatible with the periodic truncation without it.
    auto taper = [&](double x) {
        const double u = std::abs(x) / g.half_width;
        if (u <= 0.95) return 1.0;
        if (u >= 1.0) return 0.0;
        return 0.5 * (1.0 + std::cos(kPi * (u - 0.95) / 0.05));
    };

    Field out(g);
    if (g.dim == 1) {
        for (int j = 0; j < n; ++j) {
            const double x = g.coord(j);
            out.values[j] = diff.values[j] + taper(x) * (B(0, 0) * x) * g0.values[j];
        }
    } else {
        for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < n; ++j1) {
                const double x0 = g.coord(j0);
                const double x1 = g.coord(j1);
                const double b0 = B(0, 0) * x0 + B(0, 1) * x1;
                const double b1 = B(1, 0) * x0 + B(1, 1) * x1;
                const std::size_t i = g.index(j0, j1);
                out.values[i] = diff.values[i] +
                                taper(x0) * taper(x1) * (b0 * g0.values[i] + b1 * g1.values[i]);
            }
    }
    return out;
}

std::vector<Field> time_series(const OUModel& model, const Field& u0,
                               const std::vector<double>& times,
                               const PropagatorConfig& cfg) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0) throw DomainError("time_series: times must be nonnegative");
        if (i > 0 && times[i] < times[i - 1])
            throw DomainError("time_series: times must be sorted");
    }
    std::vector<Field> out;
    out.reserve(times.size());
    if (times.empty()) return out;

    require_boundary_decay(u0, "time_series");
    TapGrid interp;
    bool have_interp = false;
    for (double t : times) {
        if (t == 0.0) {
            out.push_back(u0);
            continue;
        }
        FourierPropagator prop(model, u0.grid, t, cfg);
        if (!have_interp) {
            interp = prop.make_interpolant(u0);
            have_interp = true;
        }
        out.push_back(prop.apply(interp));
    }
    return out;
}

}  // namespace ou
