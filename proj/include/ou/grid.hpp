#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "ou/errors.hpp"

namespace ou {

using cplx = std::complex<double>;

/// Truncated periodic grid on [-L, L)^N with n points per axis (n a power of
/// two). Spatial spacing h = 2L/n; frequency grid xi_k = pi k / L for
/// k in {-n/2, ..., n/2 - 1} per axis.
struct GridSpec {
    int dim = 1;
    double half_width = 8.0;
    int points_per_axis = 256;

    GridSpec() = default;
    GridSpec(int dim_, double half_width_, int n_);

    double spacing() const noexcept { return 2.0 * half_width / points_per_axis; }
    double freq_spacing() const noexcept {
        return 3.141592653589793238462643383279502884 / half_width;
    }
    /// Total number of grid points n^N.
    std::size_t size() const noexcept {
        std::size_t s = static_cast<std::size_t>(points_per_axis);
        return dim == 1 ? s : s * s;
    }
    /// Cell volume h^N.
    double cell_volume() const noexcept {
        const double h = spacing();
        return dim == 1 ? h : h * h;
    }
    double coord(int j) const noexcept { return -half_width + j * spacing(); }
    double freq(int k_signed) const noexcept { return k_signed * freq_spacing(); }

    /// Row-major flat index; axis 0 is the slow index in 2D.
    std::size_t index(int j0, int j1 = 0) const noexcept {
        return dim == 1 ? static_cast<std::size_t>(j0)
                        : static_cast<std::size_t>(j0) * points_per_axis + j1;
    }

    bool operator==(const GridSpec& o) const noexcept {
        return dim == o.dim && half_width == o.half_width &&
               points_per_axis == o.points_per_axis;
    }
};

/// Sampled complex-valued function on a grid.
struct Field {
    GridSpec grid;
    std::vector<cplx> values;

    Field() = default;
    explicit Field(const GridSpec& g) : grid(g), values(g.size(), cplx(0.0)) {}
    Field(const GridSpec& g, std::vector<cplx> v);

    cplx& at(int j0, int j1 = 0) { return values[grid.index(j0, j1)]; }
    const cplx& at(int j0, int j1 = 0) const { return values[grid.index(j0, j1)]; }
};

/// Discrete Fourier coefficients on the centered frequency grid. Storage is
/// negative-to-positive: index a per axis holds the coefficient at
/// xi = pi (a - n/2) / L.
struct SpectralField {
    GridSpec grid;
    std::vector<cplx> coeffs;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g), coeffs(g.size(), cplx(0.0)) {}
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) throw GridMismatch(std::string(what) + ": grids differ");
}

/// max |f| over the outermost grid shell divided by max |f| overall
/// (0 when the field vanishes). Used for the boundary-decay preconditions.
double boundary_decay_ratio(const Field& f);

}  // namespace ou
