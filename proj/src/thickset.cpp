#include "ou/thickset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "ou/rng.hpp"

namespace ou {

ThickSetSpec ThickSetSpec::slabs(double period, double width) {
    ThickSetSpec s;
    s.kind = Kind::periodic_slabs;
    s.period = period;
    s.width = width;
    if (!(width > 0.0 && width <= period))
        throw ConfigError("thick set: slabs need 0 < width <= period");
    return s;
}

ThickSetSpec ThickSetSpec::cubes(double period, double width) {
    ThickSetSpec s = slabs(period, width);
    s.kind = Kind::periodic_cubes;
    return s;
}

ThickSetSpec ThickSetSpec::bernoulli(double cell_side, double keep_prob,
                                     std::uint64_t seed) {
    ThickSetSpec s;
    s.kind = Kind::bernoulli_cells;
    s.cell_side = cell_side;
    s.keep_prob = keep_prob;
    s.seed = seed;
    if (!(keep_prob >= 0.0 && keep_prob <= 1.0))
        throw ConfigError("thick set: keep probability must lie in [0,1]");
    if (!(cell_side > 0.0)) throw ConfigError("thick set: cell side must be positive");
    return s;
}

ThickSetSpec ThickSetSpec::all() { return ThickSetSpec{}; }

namespace {

double wrap_mod(double x, double p) {
    const double m = x - p * std::floor(x / p);
    return m < p ? m : 0.0;
}

}  // namespace

ObservationMask build_mask(const ThickSetSpec& spec, const GridSpec& grid) {
    ObservationMask out;
    out.grid = grid;
    out.mask.assign(grid.size(), 0);
    const int n = grid.points_per_axis;

    switch (spec.kind) {
        case ThickSetSpec::Kind::full: {
            std::fill(out.mask.begin(), out.mask.end(), 1);
            out.certificate = ThicknessCertificate{1.0, std::vector<double>(grid.dim, 1.0)};
            break;
        }
        case ThickSetSpec::Kind::periodic_slabs: {
            if (grid.dim != 1) throw ConfigError("periodic_slabs is a 1D set");
            for (int j = 0; j < n; ++j)
                out.mask[j] = wrap_mod(grid.coord(j), spec.period) < spec.width ? 1 : 0;
            out.certificate =
                ThicknessCertificate{spec.width / spec.period, {spec.period}};
            break;
        }
        case ThickSetSpec::Kind::periodic_cubes: {
            if (grid.dim != 2) throw ConfigError("periodic_cubes is a 2D set");
            for (int j0 = 0; j0 < n; ++j0)
                for (int j1 = 0; j1 < n; ++j1) {
                    const bool in = wrap_mod(grid.coord(j0), spec.period) < spec.width &&
                                    wrap_mod(grid.coord(j1), spec.period) < spec.width;
                    out.mask[grid.index(j0, j1)] = in ? 1 : 0;
                }
            const double lam = (spec.width / spec.period) * (spec.width / spec.period);
            out.certificate = ThicknessCertificate{lam, {spec.period, spec.period}};
            break;
        }
        case ThickSetSpec::Kind::bernoulli_cells: {
            Rng rng(spec.seed);
            const int cells =
                std::max(1, static_cast<int>(std::ceil(2.0 * grid.half_width / spec.cell_side)));
            std::vector<std::uint8_t> keep;
            const int total = grid.dim == 1 ? cells : cells * cells;
            keep.reserve(total);
            for (int c = 0; c < total; ++c)
                keep.push_back(rng.uniform() < spec.keep_prob ? 1 : 0);

            auto cell_of = [&](double x) {
                int c = static_cast<int>(std::floor((x + grid.half_width) / spec.cell_side));
                return std::clamp(c, 0, cells - 1);
            };
            if (grid.dim == 1) {
                for (int j = 0; j < n; ++j) out.mask[j] = keep[cell_of(grid.coord(j))];
            } else {
                for (int j0 = 0; j0 < n; ++j0)
                    for (int j1 = 0; j1 < n; ++j1)
                        out.mask[grid.index(j0, j1)] =
                            keep[cell_of(grid.coord(j0)) * cells + cell_of(grid.coord(j1))];
            }
            break;
        }
        case ThickSetSpec::Kind::custom_mask: {
            if (spec.custom.size() != grid.size())
                throw ConfigError("custom mask size does not match the grid");
            out.mask = spec.custom;
            break;
        }
    }
    return out;
}

namespace {

// Inclusive prefix counts with one guard row/column of zeros.
struct IntegralImage {
    int n;
    std::vector<std::int64_t> sum;  // (n+1)^2

    explicit IntegralImage(const ObservationMask& m) : n(m.grid.points_per_axis) {
        sum.assign(static_cast<std::size_t>(n + 1) * (n + 1), 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::int64_t v = m.mask[m.grid.index(i, j)] ? 1 : 0;
                at(i + 1, j + 1) = v + at(i, j + 1) + at(i + 1, j) - at(i, j);
            }
    }
    std::int64_t& at(int i, int j) {
        return sum[static_cast<std::size_t>(i) * (n + 1) + j];
    }
    std::int64_t rect(int i0, int j0, int w, int h) {
        return at(i0 + w, j0 + h) - at(i0, j0 + h) - at(i0 + w, j0) + at(i0, j0);
    }
    // Periodic window starting at (i0, j0), extents (w, h) <= n.
    std::int64_t wrapped(int i0, int j0, int w, int h) {
        std::int64_t total = 0;
        const int w1 = std::min(w, n - i0), w2 = w - w1;
        const int h1 = std::min(h, n - j0), h2 = h - h1;
        total += rect(i0, j0, w1, h1);
        if (w2 > 0) total += rect(0, j0, w2, h1);
        if (h2 > 0) total += rect(i0, 0, w1, h2);
        if (w2 > 0 && h2 > 0) total += rect(0, 0, w2, h2);
        return total;
    }
};

}  // namespace

ThicknessCheck check_thickness(const ObservationMask& mask, double lambda,
                               const std::vector<double>& a, int translates) {
    const GridSpec& g = mask.grid;
    const int n = g.points_per_axis;
    const double h = g.spacing();
    if (static_cast<int>(a.size()) != g.dim)
        throw ConfigError("check_thickness: rectangle sides must match the dimension");
    std::vector<int> w(g.dim);
    double slack = 0.0;
    for (int d = 0; d < g.dim; ++d) {
        if (!(a[d] > 0.0 && a[d] < 2.0 * g.half_width))
            throw DomainError("check_thickness: rectangle sides must lie in (0, 2L)");
        if (a[d] / h < 8.0)
            throw ResolutionTooCoarse("check_thickness: fewer than 8 cells across the rectangle");
        w[d] = std::max(1, static_cast<int>(std::lround(a[d] / h)));
        slack += 1.0 / w[d];
    }

    ThicknessCheck out;
    out.slack = slack;
    double worst = 1.0;

    if (g.dim == 1) {
        std::vector<std::int64_t> prefix(n + 1, 0);
        for (int j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + (mask.mask[j] ? 1 : 0);
        const int m = std::min(translates, n);
        for (int i = 0; i < m; ++i) {
            const int s = static_cast<int>(static_cast<std::int64_t>(i) * n / m);
            std::int64_t cnt;
            if (s + w[0] <= n)
                cnt = prefix[s + w[0]] - prefix[s];
            else
                cnt = (prefix[n] - prefix[s]) + prefix[s + w[0] - n];
            worst = std::min(worst, static_cast<double>(cnt) / w[0]);
            ++out.translates_checked;
        }
    } else {
        IntegralImage img(mask);
        const int per_axis =
            std::min(n, std::max(1, static_cast<int>(std::ceil(std::sqrt(double(translates))))));
        for (int i = 0; i < per_axis; ++i) {
            const int s0 = static_cast<int>(static_cast<std::int64_t>(i) * n / per_axis);
            for (int j = 0; j < per_axis; ++j) {
                const int s1 = static_cast<int>(static_cast<std::int64_t>(j) * n / per_axis);
                const std::int64_t cnt = img.wrapped(s0, s1, w[0], w[1]);
                worst = std::min(worst, static_cast<double>(cnt) / (double(w[0]) * w[1]));
                ++out.translates_checked;
            }
        }
    }

    out.worst_fraction = worst;
    out.pass = worst >= lambda - slack;
    return out;
}

Field restrict_to(const Field& f, const ObservationMask& mask) {
    require_same_grid(f.grid, mask.grid, "restrict_to");
    Field out = f;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (!mask.mask[i]) out.values[i] = cplx(0.0);
    return out;
}

namespace {
constexpr char kMaskMagic[6] = {'O', 'U', 'M', 'S', 'K', '1'};
}

void write_mask(const std::string& path, const ObservationMask& mask) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    char header[32] = {};
    std::memcpy(header, kMaskMagic, 6);
    const std::int32_t dim = mask.grid.dim;
    const std::int32_t n = mask.grid.points_per_axis;
    const double L = mask.grid.half_width;
    std::memcpy(header + 8, &dim, 4);
    std::memcpy(header + 12, &n, 4);
    std::memcpy(header + 16, &L, 8);
    os.write(header, sizeof header);

    // RLE: leading value byte, then uint32 run lengths.
    std::uint8_t current = mask.mask.empty() ? 0 : mask.mask[0];
    os.write(reinterpret_cast<const char*>(&current), 1);
    std::uint32_t run = 0;
    for (std::uint8_t b : mask.mask) {
        if ((b ? 1 : 0) == current) {
            ++run;
        } else {
            os.write(reinterpret_cast<const char*>(&run), 4);
            current = b ? 1 : 0;
            run = 1;
        }
    }
    os.write(reinterpret_cast<const char*>(&run), 4);
    if (!os) throw ConfigError("write failed: " + path);
}

ObservationMask read_mask(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open for reading: " + path);
    char header[32] = {};
    is.read(header, sizeof header);
    if (!is || std::memcmp(header, kMaskMagic, 6) != 0)
        throw ConfigError("mask file: bad magic");
    std::int32_t dim = 0, n = 0;
    double L = 0.0;
    std::memcpy(&dim, header + 8, 4);
    std::memcpy(&n, header + 12, 4);
    std::memcpy(&L, header + 16, 8);

    ObservationMask out;
    out.grid = GridSpec(dim, L, n);
    out.mask.reserve(out.grid.size());
    std::uint8_t value = 0;
    is.read(reinterpret_cast<char*>(&value), 1);
    while (out.mask.size() < out.grid.size()) {
        std::uint32_t run = 0;
        is.read(reinterpret_cast<char*>(&run), 4);
        if (!is) throw ConfigError("truncated mask file: " + path);
        for (std::uint32_t i = 0; i < run && out.mask.size() < out.grid.size(); ++i)
            out.mask.push_back(value);
        value = value ? 0 : 1;
    }
    return out;
}

}  // namespace ou
