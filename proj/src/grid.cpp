#include "ou/grid.hpp"

#include <algorithm>
#include <cmath>

namespace ou {

namespace {
bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

GridSpec::GridSpec(int dim_, double half_width_, int n_)
    : dim(dim_), half_width(half_width_), points_per_axis(n_) {
    if (dim != 1 && dim != 2)
        throw ConfigError("GridSpec: dimension must be 1 or 2");
    if (!(half_width > 0.0))
        throw ConfigError("GridSpec: half width must be positive");
    if (!power_of_two(points_per_axis) || points_per_axis < 16 || points_per_axis > 4096)
        throw ConfigError("GridSpec: points per axis must be a power of two in [16, 4096]");
}

Field::Field(const GridSpec& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
        throw GridMismatch("Field: value count does not match the grid");
    for (const cplx& z : values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw DomainError("Field: non-finite sample");
}

double boundary_decay_ratio(const Field& f) {
    const int n = f.grid.points_per_axis;
    double peak = 0.0;
    for (const cplx& z : f.values) peak = std::max(peak, std::abs(z));
    if (peak == 0.0) return 0.0;

    double edge = 0.0;
    if (f.grid.dim == 1) {
        edge = std::max(std::abs(f.values[0]), std::abs(f.values[n - 1]));
    } else {
        for (int j = 0; j < n; ++j) {
            edge = std::max(edge, std::abs(f.at(0, j)));
            edge = std::max(edge, std::abs(f.at(n - 1, j)));
            edge = std::max(edge, std::abs(f.at(j, 0)));
            edge = std::max(edge, std::abs(f.at(j, n - 1)));
        }
    }
    return edge / peak;
}

}  // namespace ou
