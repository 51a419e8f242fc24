#pragma once

#include "ou/grid.hpp"

namespace ou {

enum class InterpKind { nearest, linear, cubic };

/// Separable interpolation stencil on the fine grid: per-axis base index
/// and up to 4 tap weights (outer product in 2D).
struct InterpTaps {
    int base[2] = {0, 0};
    int count = 0;  // taps per axis: 1, 2 or 4
    double w0[4] = {0, 0, 0, 0};
    double w1[4] = {0, 0, 0, 0};
};

/// Uniform periodic tap grid holding (pre-filtered) interpolation
/// coefficients. Construction from samples is linear in the samples, and
/// evaluation is a sparse gather, so the exact transpose of "build + read"
/// is available to adjoint code.
class TapGrid {
public:
    int dim = 1;
    int n = 0;          // points per axis
    double origin = 0;  // coordinate of index 0 (same on both axes)
    double step = 1;
    InterpKind kind = InterpKind::cubic;
    std::vector<cplx> coef;

    /// Per-axis stencil at a point; indices are stored unwrapped (callers
    /// wrap with wrap_index).
    void taps(const double* pt, InterpTaps& out) const;

    int wrap_index(int i) const {
        i %= n;
        return i < 0 ? i + n : i;
    }

    cplx value(const double* pt) const;

    std::size_t index(int i0, int i1) const {
        return dim == 1 ? static_cast<std::size_t>(i0)
                        : static_cast<std::size_t>(i0) * n + i1;
    }
};

/// Cubic prefilter: solves the periodic B-spline interpolation system by
/// dividing by the spline symbol (2/3 + cos/3 per axis) in the index-DFT
/// domain. Hermitian as an operator, hence self-adjoint. No-op for
/// nearest/linear kinds.
void bspline_prefilter(std::vector<cplx>& data, int dim, int n, InterpKind kind);

/// Interpolant of the discrete transform u0_hat on a frequency grid
/// refined `upsample` times (spatial zero-padding, so the refined samples
/// are exact values of the underlying trigonometric integral).
TapGrid build_frequency_interpolant(const Field& u0, int upsample, InterpKind kind);

/// Interpolant of u0 itself on a spatial grid refined `upsample` times
/// (frequency zero-padding: exact trigonometric upsampling, periodic).
TapGrid build_spatial_interpolant(const Field& u0, int upsample, InterpKind kind);

/// Exact transpose of build_frequency_interpolant: maps an adjoint tap
/// array back to the coarse sample grid.
Field frequency_interpolant_adjoint(const TapGrid& adjoint_coef, const GridSpec& grid,
                                    int upsample, InterpKind kind);

/// Raw-index DFT buffer <-> centered array with alternating-sign phases
/// (the reindexing both transforms share). The two maps are exact
/// transposes of each other at equal scale.
void centered_from_raw(const std::vector<cplx>& raw, std::vector<cplx>& centered, int dim,
                       int n, double scale);
void raw_from_centered(const std::vector<cplx>& centered, std::vector<cplx>& raw, int dim,
                       int n, double scale);

}  // namespace ou
