#include "ou/field_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace ou {

namespace {

constexpr char kMagic[6] = {'O', 'U', 'F', 'L', 'D', '1'};

// Headers assume a little-endian host, which is the only platform this
// format targets.
void put_header(std::ostream& os, const GridSpec& g) {
    char header[32] = {};
    std::memcpy(header, kMagic, 6);
    const std::int32_t dim = g.dim;
    const std::int32_t n = g.points_per_axis;
    const double L = g.half_width;
    std::memcpy(header + 8, &dim, 4);
    std::memcpy(header + 12, &n, 4);
    std::memcpy(header + 16, &L, 8);
    os.write(header, sizeof header);
}

GridSpec get_header(std::istream& is) {
    char header[32] = {};
    is.read(header, sizeof header);
    if (!is || std::memcmp(header, kMagic, 6) != 0)
        throw ConfigError("field file: bad magic");
    std::int32_t dim = 0, n = 0;
    double L = 0.0;
    std::memcpy(&dim, header + 8, 4);
    std::memcpy(&n, header + 12, 4);
    std::memcpy(&L, header + 16, 8);
    return GridSpec(dim, L, n);
}

}  // namespace

void write_field(const std::string& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    put_header(os, f.grid);
    for (const cplx& z : f.values) {
        const double re = z.real(), im = z.imag();
        os.write(reinterpret_cast<const char*>(&re), 8);
        os.write(reinterpret_cast<const char*>(&im), 8);
    }
    if (!os) throw ConfigError("write failed: " + path);
}

Field read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open for reading: " + path);
    const GridSpec g = get_header(is);
    std::vector<cplx> values(g.size());
    for (cplx& z : values) {
        double re = 0.0, im = 0.0;
        is.read(reinterpret_cast<char*>(&re), 8);
        is.read(reinterpret_cast<char*>(&im), 8);
        z = cplx(re, im);
    }
    if (!is) throw ConfigError("truncated field file: " + path);
    return Field(g, std::move(values));
}

void write_field_csv(std::ostream& os, const Field& f) {
    const GridSpec& g = f.grid;
    char buf[128];
    if (g.dim == 1) {
        os << "x,re,im\n";
        for (int j = 0; j < g.points_per_axis; ++j) {
            const cplx z = f.values[j];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.coord(j), z.real(),
                          z.imag());
            os << buf;
        }
    } else {
        os << "x0,x1,re,im\n";
        for (int j0 = 0; j0 < g.points_per_axis; ++j0)
            for (int j1 = 0; j1 < g.points_per_axis; ++j1) {
                const cplx z = f.values[g.index(j0, j1)];
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", g.coord(j0),
                              g.coord(j1), z.real(), z.imag());
                os << buf;
            }
    }
}

void write_field_csv(const std::string& path, const Field& f) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    write_field_csv(os, f);
}

}  // namespace ou
