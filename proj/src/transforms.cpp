#include "ou/transforms.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace ou {

namespace {

// FFTW's planner is not thread-safe; executing a cached plan on fresh
// buffers is. Plans are created unaligned so std::vector storage works.
class PlanCache {
public:
    fftw_plan get(int dim, int n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_tuple(dim, n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        const std::size_t total = dim == 1 ? static_cast<std::size_t>(n)
                                           : static_cast<std::size_t>(n) * n;
        std::vector<cplx> scratch(total);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = dim == 1
            ? fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
            : fftw_plan_dft_2d(n, n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace

void dft_inplace(std::vector<cplx>& data, int dim, int n, int sign) {
    fftw_plan p = plan_cache().get(dim, n, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, buf, buf);
}

SpectralField forward_transform(const Field& f) {
    const GridSpec& g = f.grid;
    const int n = g.points_per_axis;
    const int half = n / 2;
    std::vector<cplx> buf = f.values;
    dft_inplace(buf, g.dim, n, -1);

    SpectralField F(g);
    const double scale = g.cell_volume();
    if (g.dim == 1) {
        for (int a = 0; a < n; ++a) {
            const int k = a - half;
            const int m = (k + n) % n;
            const double phase = (k & 1) ? -1.0 : 1.0;
            F.coeffs[a] = scale * phase * buf[m];
        }
    } else {
        for (int a0 = 0; a0 < n; ++a0) {
            const int k0 = a0 - half;
            const int m0 = (k0 + n) % n;
            for (int a1 = 0; a1 < n; ++a1) {
                const int k1 = a1 - half;
                const int m1 = (k1 + n) % n;
                const double phase = ((k0 + k1) & 1) ? -1.0 : 1.0;
                F.coeffs[g.index(a0, a1)] =
                    scale * phase * buf[static_cast<std::size_t>(m0) * n + m1];
            }
        }
    }
    return F;
}

Field inverse_transform(const SpectralField& F) {
    const GridSpec& g = F.grid;
    const int n = g.points_per_axis;
    const int half = n / 2;
    std::vector<cplx> buf(g.size(), cplx(0.0));
    if (g.dim == 1) {
        for (int a = 0; a < n; ++a) {
            const int k = a - half;
            const int m = (k + n) % n;
            const double phase = (k & 1) ? -1.0 : 1.0;
            buf[m] = phase * F.coeffs[a];
        }
    } else {
        for (int a0 = 0; a0 < n; ++a0) {
            const int k0 = a0 - half;
            const int m0 = (k0 + n) % n;
            for (int a1 = 0; a1 < n; ++a1) {
                const int k1 = a1 - half;
                const int m1 = (k1 + n) % n;
                const double phase = ((k0 + k1) & 1) ? -1.0 : 1.0;
                buf[static_cast<std::size_t>(m0) * n + m1] = phase * F.coeffs[g.index(a0, a1)];
            }
        }
    }
    dft_inplace(buf, g.dim, n, +1);

    Field f(g);
    const double scale = 1.0 / (g.cell_volume() * g.size());
    for (std::size_t i = 0; i < buf.size(); ++i) f.values[i] = scale * buf[i];
    return f;
}

}  // namespace ou
