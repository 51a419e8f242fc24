#pragma once

#include <limits>
#include <vector>

#include "ou/field_ops.hpp"
#include "ou/semigroup.hpp"

namespace ou {

/// Upper incomplete Gamma function Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt,
/// series for x < a + 1, continued fraction otherwise. Relative error
/// <= 1e-12 on a > 0, x >= 0.
double incomplete_gamma(double a, double x);

/// Gamma(a) = incomplete_gamma(a, 0).
double gamma_fn(double a);

/// Time-averaged symbol along the reversed flow:
/// beta(t, xi) = (1/t) int_0^t |Q^{1/2} e^{tau B^T} xi|^{2s} dtau for t > 0,
/// continued by |Q^{1/2} xi|^{2s} at t = 0 (first-order branch below 1e-8).
double beta(const OUModel& model, double t, const double* xi_unit);

/// Extrema of beta over [0, T] x S^{N-1} and derived quantities.
struct ConvexityReport {
    double c1 = 0.0;      // min beta
    double c2 = 0.0;      // max beta
    double c = 0.0;       // c1 / c2
    int time_samples = 0;
    int sphere_samples = 0;
    double worst_ratio_fractional = std::numeric_limits<double>::quiet_NaN();
    double k_needed_analytic = std::numeric_limits<double>::quiet_NaN();
};

/// Dense tensor sampling of beta plus golden-section polish around the
/// extrema. Defaults match the documented resolution 512 x 256.
ConvexityReport convexity_constant(const OUModel& model, double T, int time_samples = 512,
                                   int sphere_samples = 256);

struct FractionalCheck {
    bool pass = false;
    double worst_ratio = 0.0;
    std::vector<double> ratios;  // one per entry of t_list
    std::vector<double> lhs;
    std::vector<double> rhs;
};

/// Verifies ||u(t)|| <= e^{-tr(B)(1-c)t/2} ||u0||^{1-ct/T} ||u(T)||^{ct/T}
/// for each t in t_list, with c taken from `rep`.
FractionalCheck check_logconvexity_fractional(const OUModel& model, const Field& u0,
                                              double T, const std::vector<double>& t_list,
                                              const ConvexityReport& rep,
                                              const PropagatorConfig& cfg = {},
                                              double slack = 1e-6);

struct AnalyticCheck {
    bool pass = false;
    double k_needed = 0.0;
    std::vector<double> ratios;
};

/// Weighted-space check of the interpolation bound
/// ||u(t)||_mu <= K ||u0||_mu^{1-theta} ||u(T)||_mu^{theta},
/// theta = (t/(rT))^phi; propagation by the kernel formula, norms in L2_mu.
/// k_needed is the smallest K making every sampled inequality hold.
AnalyticCheck check_logconvexity_analytic(const OUModel& model, const Field& u0, double T,
                                          const std::vector<double>& t_list,
                                          const AngleReport& angle, double k_cap,
                                          const PropagatorConfig& cfg = {});

/// K (Gamma(1/phi) / ((-c_psi p log eta)^{1/phi} phi))^alpha, the
/// weighted-space stability bound. Requires eta in (0, 1).
double stability_bound_analytic(double eta, const AngleReport& angle, double p,
                                double alpha, double K);

/// -C / log(C1 eta), the fractional-case stability bound.
/// Requires C1 * eta in (0, 1).
double stability_bound_fractional(double eta, double C, double C1);

/// Default Hoelder/interpolation parameters for a given smoothness eps:
/// p halfway through (1, 1/(1-eps)), gamma halfway through (0, 1-1/p),
/// alpha = gamma / p.
struct HolderParams {
    double p = 1.5;
    double gamma = 0.25;
    double alpha = 0.1666666666666666666;
};
HolderParams holder_defaults(double eps);

}  // namespace ou
