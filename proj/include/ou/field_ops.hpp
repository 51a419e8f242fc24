#pragma once

#include "ou/grid.hpp"
#include "ou/model.hpp"

namespace ou {

struct ObservationMask;

/// Invariant-measure density rho sampled on the grid, with its grid mass.
/// domain_too_small is set when the mass deficit exceeds 1e-6.
struct InvariantDensity {
    Field rho;
    double mass = 0.0;
    bool domain_too_small = false;
};

InvariantDensity invariant_density(const OUModel& model, const GridSpec& grid);

/// Grid-quadrature L2 norm: sqrt(h^N sum |f|^2).
double norm_l2(const Field& f);

/// Weighted norm sqrt(int |f|^2 rho dx) against a sampled density.
double norm_l2_mu(const Field& f, const Field& rho);

/// L2 norm restricted to the masked region.
double norm_l2_masked(const Field& f, const ObservationMask& mask);

/// Grid inner product <f, g> = h^N sum conj(f) g.
cplx inner_l2(const Field& f, const Field& g);

/// Weighted Sobolev norm of order s_order: the H^s norm of
/// f(x) exp(-<Q_inf^{-1} x, x>/8), evaluated spectrally.
double norm_h_s_mu(const Field& f, const OUModel& model, double s_order);

/// Which admissibility norm the sampler rescales to.
enum class AdmissibleMode {
    weighted,  // H^{2 eps} weighted norm equals bound_M
    lebesgue,  // ||f|| + ||generator f|| equals bound_M
};

/// Random real band-limited field rescaled so the designated admissibility
/// norm equals bound_M; deterministic in seed. The raw spectrum sits on the
/// lowest quarter of the mode range with amplitude (1+|xi|^2)^{-(N+2)/2};
/// a fixed Gaussian envelope enforces the 1e-8 boundary decay the
/// propagators require.
Field sample_admissible(const OUModel& model, const GridSpec& grid, double eps,
                        double bound_M, std::uint64_t seed,
                        AdmissibleMode mode = AdmissibleMode::weighted);

/// Half-width rule used by "auto" grids:
/// L = 8 max(sqrt(max eig Q_inf), sqrt(2T ||Q||^{1/(2s)} + 1)), rounded up
/// to one decimal. Falls back to the second term when B is not Hurwitz.
double auto_half_width(const OUModel& model, double T);

}  // namespace ou
