#include "doctest.h"

#include <cmath>

#include "ou/interpolant.hpp"
#include "ou/transforms.hpp"
#include "test_util.hpp"

using namespace ou;

namespace {

// Direct evaluation of the discrete transform sum at an arbitrary frequency:
// h^N sum_j u(x_j) e^{-i x_j . xi}. The independent oracle for off-grid reads.
cplx nudft(const Field& f, const double* xi) {
    const GridSpec& g = f.grid;
    cplx acc(0.0);
    if (g.dim == 1) {
        for (int j = 0; j < g.points_per_axis; ++j) {
            const double ph = -g.coord(j) * xi[0];
            acc += f.values[j] * cplx(std::cos(ph), std::sin(ph));
        }
    } else {
        for (int j0 = 0; j0 < g.points_per_axis; ++j0)
            for (int j1 = 0; j1 < g.points_per_axis; ++j1) {
                const double ph = -(g.coord(j0) * xi[0] + g.coord(j1) * xi[1]);
                acc += f.values[g.index(j0, j1)] * cplx(std::cos(ph), std::sin(ph));
            }
    }
    return acc * g.cell_volume();
}

}  // namespace

TEST_CASE("frequency interpolant matches the direct transform sum (1D)") {
    const GridSpec g(1, 14.0, 256);
    const Field f = outest::gaussian_field(g, 1.0, 0.4);
    const TapGrid interp = build_frequency_interpolant(f, 4, InterpKind::cubic);

    // exact at the refined knots
    Rng rng(2);
    double worst_knot = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int a = static_cast<int>(rng.integer(interp.n));
        const double xi = interp.origin + a * interp.step;
        worst_knot = std::max(worst_knot, std::abs(interp.value(&xi) - nudft(f, &xi)));
    }
    CHECK(worst_knot < 1e-11);

    // between knots: spline error well under the propagator budget
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const double xi = rng.uniform(-20.0, 20.0);
        worst = std::max(worst, std::abs(interp.value(&xi) - nudft(f, &xi)));
    }
    CHECK(worst < 1e-7 * std::sqrt(2.0 * 3.14159265358979));
}

TEST_CASE("frequency interpolant matches the direct transform sum (2D)") {
    const GridSpec g(2, 10.0, 64);
    const Field f = outest::gaussian_field(g, 1.1, 0.3, -0.5);
    const TapGrid interp = build_frequency_interpolant(f, 4, InterpKind::cubic);

    double peak = 0.0;
    const SpectralField F = forward_transform(f);
    for (const cplx& c : F.coeffs) peak = std::max(peak, std::abs(c));

    Rng rng(4);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double xi[2] = {rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0)};
        worst = std::max(worst, std::abs(interp.value(xi) - nudft(f, xi)));
    }
    CHECK(worst < 2e-6 * peak);
}

TEST_CASE("spatial interpolant reproduces band-limited samples") {
    const GridSpec g(1, 12.0, 128);
    const Field f = outest::gaussian_field(g, 1.4);
    const TapGrid interp = build_spatial_interpolant(f, 4, InterpKind::cubic);

    // at grid points the samples come back
    double worst = 0.0;
    for (int j = 0; j < g.points_per_axis; ++j) {
        const double x = g.coord(j);
        worst = std::max(worst, std::abs(interp.value(&x) - f.values[j]));
    }
    CHECK(worst < 1e-11);

    // off-grid: compare with the closed-form Gaussian
    Rng rng(6);
    worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const double x = rng.uniform(-6.0, 6.0);
        worst = std::max(worst,
                         std::abs(interp.value(&x) - std::exp(-0.5 * x * x / (1.4 * 1.4))));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("spatial interpolant is exact on constants") {
    const GridSpec g(2, 8.0, 32);
    Field one(g);
    for (cplx& v : one.values) v = 1.0;
    const TapGrid interp = build_spatial_interpolant(one, 2, InterpKind::cubic);
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const double pt[2] = {rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)};
        CHECK(std::abs(interp.value(pt) - cplx(1.0)) < 1e-12);
    }
}

TEST_CASE("nearest and linear kinds interpolate the raw samples") {
    const GridSpec g(1, 10.0, 64);
    const Field f = outest::gaussian_field(g, 2.0);
    for (InterpKind kind : {InterpKind::nearest, InterpKind::linear}) {
        const TapGrid interp = build_spatial_interpolant(f, 1, kind);
        for (int j = 0; j < g.points_per_axis; ++j) {
            const double x = g.coord(j);
            CHECK(std::abs(interp.value(&x) - f.values[j]) < 1e-12);
        }
    }
}
