#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ou/grid.hpp"

namespace ou {

/// Geometric description of an observation set.
struct ThickSetSpec {
    enum class Kind {
        periodic_slabs,   // 1D: union of [k P, k P + w)
        periodic_cubes,   // 2D: cube of side w in each period-P cell
        bernoulli_cells,  // cells of side cell_side kept w.p. keep_prob
        full,
        custom_mask,
    };
    Kind kind = Kind::full;
    double period = 1.0;
    double width = 0.5;
    double cell_side = 0.25;
    double keep_prob = 0.5;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> custom;  // for Kind::custom_mask

    static ThickSetSpec slabs(double period, double width);
    static ThickSetSpec cubes(double period, double width);
    static ThickSetSpec bernoulli(double cell_side, double keep_prob, std::uint64_t seed);
    static ThickSetSpec all();
};

/// Thickness certificate: every translate of the rectangle with sides a
/// carries at least fraction lambda of observed measure.
struct ThicknessCertificate {
    double lambda = 1.0;
    std::vector<double> a;
};

struct ObservationMask {
    GridSpec grid;
    std::vector<std::uint8_t> mask;
    std::optional<ThicknessCertificate> certificate;

    std::size_t count() const {
        std::size_t c = 0;
        for (auto b : mask) c += b ? 1 : 0;
        return c;
    }
};

struct ThicknessCheck {
    bool pass = false;
    double worst_fraction = 0.0;
    double slack = 0.0;
    int translates_checked = 0;
};

/// Boolean mask sampled at grid points; deterministic in seed.
ObservationMask build_mask(const ThickSetSpec& spec, const GridSpec& grid);

/// Sampled thickness test: periodic grid-aligned translates of the
/// rectangle with sides a, measure by cell counting. Passes when the worst
/// fraction stays above lambda minus one boundary layer of cells.
ThicknessCheck check_thickness(const ObservationMask& mask, double lambda,
                               const std::vector<double>& a, int translates);

/// Pointwise restriction to the observation set (zero outside).
Field restrict_to(const Field& f, const ObservationMask& mask);

/// Run-length-encoded mask file with header "OUMSK1".
void write_mask(const std::string& path, const ObservationMask& mask);
ObservationMask read_mask(const std::string& path);

}  // namespace ou
