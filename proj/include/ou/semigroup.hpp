#pragma once

#include <vector>

#include "ou/grid.hpp"
#include "ou/interpolant.hpp"
#include "ou/model.hpp"

namespace ou {

struct PropagatorConfig {
    double quad_tol = 1e-10;            // symbol time-integral tolerance
    InterpKind interp = InterpKind::cubic;
    int kernel_quad_points = 64;        // Gauss-Legendre points per axis
    int upsample = 8;                   // frequency/space refinement for interpolation
};

/// Orientation of the exponential inside the symbol time-integral.
/// `forward` is the propagation symbol (e^{-tau B^T}); `reversed`
/// (e^{+tau B^T}) is the change-of-variable form the norm identity and the
/// convexity function are built on.
enum class SymbolDirection { forward, reversed };

/// int_0^t |Q^{1/2} e^{-/+ tau B^T} xi|^{2s} dtau, adaptive Simpson to tol.
double symbol_integral(const OUModel& model, double t, const double* xi,
                       double tol = 1e-10,
                       SymbolDirection dir = SymbolDirection::forward);

/// Same integral evaluated for every centered grid frequency at once
/// (panel-doubled Gauss-Legendre; the exponential factors are shared
/// across frequencies).
std::vector<double> symbol_integral_grid(const OUModel& model, double t,
                                         const GridSpec& grid, double tol,
                                         SymbolDirection dir = SymbolDirection::forward);

struct PropagateDiagnostics {
    bool frequency_box_exceeded = false;
    double out_of_box_mass_fraction = 0.0;  // estimated share of |u0_hat|^2 the warp drops
};

/// One-shot evaluation of the semigroup at time t on a fixed grid via the
/// Fourier representation: transform, read u0_hat at warped frequencies
/// e^{-tB^T} xi (coefficients outside the frequency box read as zero),
/// multiply by e^{-tr(B) t} exp(-symbol integral), transform back.
///
/// The warp read is realized as an explicit sparse stage over the
/// pre-filtered upsampled coefficient grid, so apply_adjoint is the exact
/// conjugate transpose of apply.
class FourierPropagator {
public:
    FourierPropagator(const OUModel& model, const GridSpec& grid, double t,
                      const PropagatorConfig& cfg = {});

    const GridSpec& grid() const { return grid_; }
    double time() const { return t_; }

    /// Full forward map (checks the boundary-decay precondition).
    Field apply(const Field& u0, PropagateDiagnostics* diag = nullptr) const;

    /// Fast path when the interpolant of u0 is shared across several times.
    Field apply(const TapGrid& interpolant) const;

    /// Exact discrete adjoint of apply(Field) with respect to the grid
    /// L2 inner product.
    Field apply_adjoint(const Field& v) const;

    /// Partial adjoint: accumulates the scattered tap array of this
    /// propagator into a shared fine buffer, so several times can share one
    /// closing frequency_interpolant_adjoint call.
    void scatter_adjoint(const Field& v, std::vector<cplx>& fine_accum) const;

    /// Builds the interpolant apply(TapGrid) expects.
    TapGrid make_interpolant(const Field& u0) const;

    int upsample() const { return cfg_.upsample; }
    InterpKind interp_kind() const { return cfg_.interp; }

private:
    GridSpec grid_;
    double t_;
    PropagatorConfig cfg_;
    double trace_factor_;            // e^{-tr(B) t}
    std::vector<double> multiplier_; // exp(-symbol integral), centered order
    Eigen::MatrixXd warp_;           // e^{-t B^T}
    std::vector<InterpTaps> taps_;   // per coarse frequency; count==0 out of box
    std::vector<std::uint8_t> inside_;
    int fine_n_ = 0;
};

Field propagate_fourier(const OUModel& model, const Field& u0, double t,
                        const PropagatorConfig& cfg = {},
                        PropagateDiagnostics* diag = nullptr);

/// Kernel-formula evaluation (s = 1 only): Gauss-Legendre quadrature of the
/// Gaussian kernel over its +-8 sigma box, reading u0 through the periodic
/// trigonometric interpolant. Constants propagate exactly up to quadrature.
Field propagate_kolmogorov(const OUModel& model, const Field& u0, double t,
                           const PropagatorConfig& cfg = {});

/// Generator application: fractional term as the Fourier multiplier
/// -<Q xi, xi>^s, drift term as spectral gradient times Bx with a cosine
/// taper on the outer 5% of the box.
Field apply_generator(const OUModel& model, const Field& u0);

/// One-shot propagation to each time (no step-to-step accumulation); the
/// interpolant of u0 is built once and shared.
std::vector<Field> time_series(const OUModel& model, const Field& u0,
                               const std::vector<double>& times,
                               const PropagatorConfig& cfg = {});

}  // namespace ou
