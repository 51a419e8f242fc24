#include "ou/interpolant.hpp"

#include <cmath>

#include "ou/transforms.hpp"

namespace ou {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

void cubic_weights(double frac, double* w) {
    const double t = frac, t2 = t * t, t3 = t2 * t;
    w[0] = (1.0 - 3.0 * t + 3.0 * t2 - t3) / 6.0;
    w[1] = (4.0 - 6.0 * t2 + 3.0 * t3) / 6.0;
    w[2] = (1.0 + 3.0 * t + 3.0 * t2 - 3.0 * t3) / 6.0;
    w[3] = t3 / 6.0;
}

void axis_taps(double u, InterpKind kind, int& base, int& count, double* w) {
    switch (kind) {
        case InterpKind::nearest: {
            base = static_cast<int>(std::floor(u + 0.5));
            count = 1;
            w[0] = 1.0;
            break;
        }
        case InterpKind::linear: {
            const int i0 = static_cast<int>(std::floor(u));
            const double t = u - i0;
            base = i0;
            count = 2;
            w[0] = 1.0 - t;
            w[1] = t;
            break;
        }
        case InterpKind::cubic: {
            const int i0 = static_cast<int>(std::floor(u));
            base = i0 - 1;
            count = 4;
            cubic_weights(u - i0, w);
            break;
        }
    }
}

}  // namespace

void TapGrid::taps(const double* pt, InterpTaps& out) const {
    int c0 = 0, c1 = 0;
    axis_taps((pt[0] - origin) / step, kind, out.base[0], c0, out.w0);
    if (dim == 2) {
        axis_taps((pt[1] - origin) / step, kind, out.base[1], c1, out.w1);
    }
    out.count = c0;
}

cplx TapGrid::value(const double* pt) const {
    InterpTaps t;
    taps(pt, t);
    cplx acc(0.0);
    if (dim == 1) {
        for (int i = 0; i < t.count; ++i)
            acc += t.w0[i] * coef[wrap_index(t.base[0] + i)];
    } else {
        for (int i = 0; i < t.count; ++i) {
            const int r = wrap_index(t.base[0] + i);
            cplx row(0.0);
            for (int j = 0; j < t.count; ++j)
                row += t.w1[j] * coef[index(r, wrap_index(t.base[1] + j))];
            acc += t.w0[i] * row;
        }
    }
    return acc;
}

void bspline_prefilter(std::vector<cplx>& data, int dim, int n, InterpKind kind) {
    if (kind != InterpKind::cubic) return;
    dft_inplace(data, dim, n, -1);
    const double step = 2.0 * kPi / n;
    std::vector<double> inv_symbol(n);
    for (int m = 0; m < n; ++m)
        inv_symbol[m] = 1.0 / (2.0 / 3.0 + std::cos(step * m) / 3.0);
    const double scale = dim == 1 ? 1.0 / n : 1.0 / (static_cast<double>(n) * n);
    if (dim == 1) {
        for (int m = 0; m < n; ++m) data[m] *= inv_symbol[m] * scale;
    } else {
        for (int m0 = 0; m0 < n; ++m0)
            for (int m1 = 0; m1 < n; ++m1)
                data[static_cast<std::size_t>(m0) * n + m1] *=
                    inv_symbol[m0] * inv_symbol[m1] * scale;
    }
    dft_inplace(data, dim, n, +1);
}

void centered_from_raw(const std::vector<cplx>& raw, std::vector<cplx>& centered, int dim,
                       int n, double scale) {
    const int half = n / 2;
    if (dim == 1) {
        for (int a = 0; a < n; ++a) {
            const int k = a - half;
            const int m = (k + n) % n;
            centered[a] = ((k & 1) ? -scale : scale) * raw[m];
        }
    } else {
        for (int a0 = 0; a0 < n; ++a0) {
            const int m0 = (a0 - half + n) % n;
            for (int a1 = 0; a1 < n; ++a1) {
                const int m1 = (a1 - half + n) % n;
                const double s = ((a0 + a1 - n) & 1) ? -scale : scale;
                centered[static_cast<std::size_t>(a0) * n + a1] =
                    s * raw[static_cast<std::size_t>(m0) * n + m1];
            }
        }
    }
}

void raw_from_centered(const std::vector<cplx>& centered, std::vector<cplx>& raw, int dim,
                       int n, double scale) {
    const int half = n / 2;
    if (dim == 1) {
        for (int a = 0; a < n; ++a) {
            const int k = a - half;
            const int m = (k + n) % n;
            raw[m] = ((k & 1) ? -scale : scale) * centered[a];
        }
    } else {
        for (int a0 = 0; a0 < n; ++a0) {
            const int m0 = (a0 - half + n) % n;
            for (int a1 = 0; a1 < n; ++a1) {
                const int m1 = (a1 - half + n) % n;
                const double s = ((a0 + a1 - n) & 1) ? -scale : scale;
                raw[static_cast<std::size_t>(m0) * n + m1] =
                    s * centered[static_cast<std::size_t>(a0) * n + a1];
            }
        }
    }
}

TapGrid build_frequency_interpolant(const Field& u0, int upsample, InterpKind kind) {
    const GridSpec& g = u0.grid;
    const int n = g.points_per_axis;
    const int nf = n * upsample;
    const int off = (upsample - 1) * n / 2;  // centered embed of [-L,L) into [-pL,pL)

    // Zero-pad in space, transform, center. The result samples the integral
    // transform of u0 on the p-times finer frequency grid.
    std::vector<cplx> fine(g.dim == 1 ? nf : static_cast<std::size_t>(nf) * nf, cplx(0.0));
    if (g.dim == 1) {
        for (int j = 0; j < n; ++j) fine[off + j] = u0.values[j];
    } else {
        for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < n; ++j1)
                fine[static_cast<std::size_t>(off + j0) * nf + (off + j1)] =
                    u0.values[g.index(j0, j1)];
    }
    dft_inplace(fine, g.dim, nf, -1);

    TapGrid out;
    out.dim = g.dim;
    out.n = nf;
    out.step = g.freq_spacing() / upsample;
    out.origin = -(nf / 2) * out.step;
    out.kind = kind;
    out.coef.resize(fine.size());
    centered_from_raw(fine, out.coef, g.dim, nf, g.cell_volume());
    bspline_prefilter(out.coef, g.dim, nf, kind);
    return out;
}

Field frequency_interpolant_adjoint(const TapGrid& adj, const GridSpec& grid, int upsample,
                                    InterpKind kind) {
    const int n = grid.points_per_axis;
    const int nf = n * upsample;
    const int off = (upsample - 1) * n / 2;

    std::vector<cplx> work = adj.coef;
    bspline_prefilter(work, grid.dim, nf, kind);  // self-adjoint stage

    std::vector<cplx> raw(work.size());
    raw_from_centered(work, raw, grid.dim, nf, grid.cell_volume());
    dft_inplace(raw, grid.dim, nf, +1);  // conjugate transpose of the forward DFT

    Field out(grid);
    if (grid.dim == 1) {
        for (int j = 0; j < n; ++j) out.values[j] = raw[off + j];
    } else {
        for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < n; ++j1)
                out.values[grid.index(j0, j1)] =
                    raw[static_cast<std::size_t>(off + j0) * nf + (off + j1)];
    }
    return out;
}

TapGrid build_spatial_interpolant(const Field& u0, int upsample, InterpKind kind) {
    const GridSpec& g = u0.grid;
    const int n = g.points_per_axis;
    const int nf = n * upsample;
    const int half = n / 2;

    // Zero-pad in frequency: same box, p-times finer spatial sampling
    // (exact trigonometric upsampling of the periodic samples).
    const SpectralField F = forward_transform(u0);
    std::vector<cplx> fine(g.dim == 1 ? nf : static_cast<std::size_t>(nf) * nf, cplx(0.0));
    const double inv_vol = 1.0 / (g.cell_volume() * g.size());
    if (g.dim == 1) {
        for (int a = 0; a < n; ++a) {
            const int k = a - half;
            const int m = (k + nf) % nf;
            fine[m] = ((k & 1) ? -inv_vol : inv_vol) * F.coeffs[a];
        }
    } else {
        for (int a0 = 0; a0 < n; ++a0) {
            const int k0 = a0 - half;
            const int m0 = (k0 + nf) % nf;
            for (int a1 = 0; a1 < n; ++a1) {
                const int k1 = a1 - half;
                const int m1 = (k1 + nf) % nf;
                const double s = ((k0 + k1) & 1) ? -inv_vol : inv_vol;
                fine[static_cast<std::size_t>(m0) * nf + m1] = s * F.coeffs[g.index(a0, a1)];
            }
        }
    }
    dft_inplace(fine, g.dim, nf, +1);

    // Index m on the fine array corresponds to x = -L + m h/p.
    TapGrid out;
    out.dim = g.dim;
    out.n = nf;
    out.step = g.spacing() / upsample;
    out.origin = -g.half_width;
    out.kind = kind;
    out.coef = std::move(fine);
    bspline_prefilter(out.coef, g.dim, nf, kind);
    return out;
}

}  // namespace ou
