#include "ou/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ou/matops.hpp"

namespace ou {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

// ---- incomplete Gamma -----------------------------------------------------

namespace {

// Lower regularized series: gamma(a,x) = x^a e^{-x} sum x^n / (a)_{n+1}.
double lower_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x));
}

// Upper continued fraction by the modified Lentz method.
double upper_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x)) * h;
}

}  // namespace

double incomplete_gamma(double a, double x) {
    if (!(a > 0.0)) throw DomainError("incomplete_gamma: a must be positive");
    if (x < 0.0) throw DomainError("incomplete_gamma: x must be nonnegative");
    if (x == 0.0) return std::tgamma(a);
    if (x < a + 1.0) return std::tgamma(a) - lower_series(a, x);
    return upper_cf(a, x);
}

double gamma_fn(double a) { return incomplete_gamma(a, 0.0); }

// ---- beta and its extrema -------------------------------------------------

double beta(const OUModel& model, double t, const double* xi_unit) {
    Eigen::VectorXd xi(model.dim());
    for (int d = 0; d < model.dim(); ++d) xi(d) = xi_unit[d];
    if (std::abs(xi.norm() - 1.0) > 1e-12)
        throw DomainError("beta: direction must be a unit vector");

    const auto g0 = [&] { return std::pow(xi.dot(model.Q() * xi), model.s()); };
    if (t < 0.0) throw DomainError("beta: t must be nonnegative");
    if (t < 1e-8) {
        // (1/t) int_0^t f = f(0) + (t/2) f'(0) + O(t^2)
        const double q = xi.dot(model.Q() * xi);
        const Eigen::MatrixXd R = model.B() * model.Q() + model.Q() * model.B().transpose();
        const double dq = xi.dot(R * xi);
        return g0() + 0.5 * t * model.s() * std::pow(q, model.s() - 1.0) * dq;
    }
    return symbol_integral(model, t, xi_unit, 1e-12, SymbolDirection::reversed) / t;
}

namespace {

Eigen::VectorXd direction_1d(int j) {
    Eigen::VectorXd d(1);
    d(0) = j == 0 ? 1.0 : -1.0;
    return d;
}

Eigen::VectorXd direction_2d(double angle) {
    Eigen::VectorXd d(2);
    d(0) = std::cos(angle);
    d(1) = std::sin(angle);
    return d;
}

double beta_at(const OUModel& model, double t, const Eigen::VectorXd& d) {
    return beta(model, t, d.data());
}

// Golden-section refinement of f over [lo, hi]; minimize or maximize.
template <typename F>
double golden(const F& f, double lo, double hi, bool maximize, double tol) {
    const double gr = 0.6180339887498948482;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        const bool pick_left = maximize ? (f1 > f2) : (f1 < f2);
        if (pick_left) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    const double fm = f(xm);
    return maximize ? std::max({f1, f2, fm}) : std::min({f1, f2, fm});
}

}  // namespace

ConvexityReport convexity_constant(const OUModel& model, double T, int time_samples,
                                   int sphere_samples) {
    if (time_samples < 64 || sphere_samples < 64)
        throw DomainError("convexity_constant: need at least 64 samples per axis");
    if (!(T > 0.0)) throw DomainError("convexity_constant: T must be positive");

    const int N = model.dim();
    const int n_dir = N == 1 ? 2 : sphere_samples;
    std::vector<Eigen::VectorXd> dirs;
    dirs.reserve(n_dir);
    if (N == 1) {
        dirs.push_back(direction_1d(0));
        dirs.push_back(direction_1d(1));
    } else {
        for (int j = 0; j < n_dir; ++j) dirs.push_back(direction_2d(2.0 * kPi * j / n_dir));
    }

    // Cumulative panel quadrature: beta on the whole time grid in one sweep.
    // Each panel uses a fixed Gauss rule; exponentials are shared across
    // directions.
    const double dt = T / (time_samples - 1);
    std::vector<double> acc(n_dir, 0.0);  // running integral per direction
    std::vector<std::vector<double>> beta_table(time_samples,
                                                std::vector<double>(n_dir, 0.0));
    for (int j = 0; j < n_dir; ++j)
        beta_table[0][j] = std::pow(dirs[j].dot(model.Q() * dirs[j]), model.s());

    // 12-point Gauss rule per panel of width dt.
    static const double gnode[12] = {
        -0.9815606342467192, -0.9041172563704749, -0.7699026741943047,
        -0.5873179542866175, -0.3678314989981802, -0.1252334085114689,
        0.1252334085114689,  0.3678314989981802,  0.5873179542866175,
        0.7699026741943047,  0.9041172563704749,  0.9815606342467192};
    static const double gweight[12] = {
        0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
        0.2031674267230659, 0.2334925365383548, 0.2491470458134028,
        0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
        0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

    for (int i = 1; i < time_samples; ++i) {
        const double t0 = (i - 1) * dt;
        for (int q = 0; q < 12; ++q) {
            const double tau = t0 + 0.5 * dt * (gnode[q] + 1.0);
            const double gw = 0.5 * dt * gweight[q];
            const Eigen::MatrixXd E = expm(model.B(), tau);
            const Eigen::MatrixXd M = E * model.Q() * E.transpose();
            for (int j = 0; j < n_dir; ++j)
                acc[j] += gw * std::pow(dirs[j].dot(M * dirs[j]), model.s());
        }
        const double t = i * dt;
        for (int j = 0; j < n_dir; ++j) beta_table[i][j] = acc[j] / t;
    }

    double c1 = std::numeric_limits<double>::infinity();
    double c2 = -std::numeric_limits<double>::infinity();
    int i_min = 0, j_min = 0, i_max = 0, j_max = 0;
    for (int i = 0; i < time_samples; ++i)
        for (int j = 0; j < n_dir; ++j) {
            const double v = beta_table[i][j];
            if (v < c1) { c1 = v; i_min = i; j_min = j; }
            if (v > c2) { c2 = v; i_max = i; j_max = j; }
        }

    // Local polish: golden-section in t, then (2D) in the angle.
    auto polish = [&](int i0, int j0, bool maximize) {
        const double t_lo = std::max(0.0, (i0 - 1) * dt);
        const double t_hi = std::min(T, (i0 + 1) * dt);
        Eigen::VectorXd d = dirs[j0];
        double best = golden(
            [&](double t) { return beta_at(model, t, d); }, t_lo, t_hi, maximize,
            1e-6 * T);
        if (N == 2) {
            const double a0 = 2.0 * kPi * j0 / n_dir;
            const double da = 2.0 * kPi / n_dir;
            const double refined = golden(
                [&](double a) {
                    const Eigen::VectorXd dd = direction_2d(a);
                    auto ft = [&](double t) { return beta_at(model, t, dd); };
                    return golden(ft, t_lo, t_hi, maximize, 1e-6 * T);
                },
                a0 - da, a0 + da, maximize, 1e-6);
            best = maximize ? std::max(best, refined) : std::min(best, refined);
        }
        return best;
    };

    ConvexityReport rep;
    rep.c1 = std::min(c1, polish(i_min, j_min, false));
    rep.c2 = std::max(c2, polish(i_max, j_max, true));
    rep.c = rep.c1 / rep.c2;
    rep.time_samples = time_samples;
    rep.sphere_samples = n_dir;
    return rep;
}

// ---- log-convexity checks -------------------------------------------------

FractionalCheck check_logconvexity_fractional(const OUModel& model, const Field& u0,
                                              double T, const std::vector<double>& t_list,
                                              const ConvexityReport& rep,
                                              const PropagatorConfig& cfg, double slack) {
    if (norm_l2(u0) == 0.0) throw DomainError("log-convexity check: u0 must be nonzero");
    std::vector<double> times = t_list;
    std::sort(times.begin(), times.end());
    times.push_back(T);  // final state evaluated in the same sweep
    const std::vector<Field> states = time_series(model, u0, times, cfg);

    const double n0 = norm_l2(u0);
    const double nT = norm_l2(states.back());
    if (nT < 1e-280)
        throw ConvergenceError("log-convexity check: ||u(T)|| degenerate (below 1e-280)");

    FractionalCheck out;
    out.pass = true;
    const double trB = model.trace_B();
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        const double t = times[i];
        const double lhs = norm_l2(states[i]);
        const double theta = rep.c * t / T;
        const double rhs = std::exp(-0.5 * trB * (1.0 - rep.c) * t) *
                           std::pow(n0, 1.0 - theta) * std::pow(nT, theta);
        const double ratio = lhs / rhs;
        out.lhs.push_back(lhs);
        out.rhs.push_back(rhs);
        out.ratios.push_back(ratio);
        out.worst_ratio = std::max(out.worst_ratio, ratio);
        if (ratio > 1.0 + slack) out.pass = false;
    }
    return out;
}

AnalyticCheck check_logconvexity_analytic(const OUModel& model, const Field& u0, double T,
                                          const std::vector<double>& t_list,
                                          const AngleReport& angle, double k_cap,
                                          const PropagatorConfig& cfg) {
    model.require_hurwitz("check_logconvexity_analytic");
    const InvariantDensity density = invariant_density(model, u0.grid);
    const double n0 = norm_l2_mu(u0, density.rho);
    if (n0 == 0.0) throw DomainError("log-convexity check: u0 must be nonzero");

    const Field uT = propagate_kolmogorov(model, u0, T, cfg);
    const double nT = norm_l2_mu(uT, density.rho);
    if (nT < 1e-280)
        throw ConvergenceError("log-convexity check: ||u(T)|| degenerate (below 1e-280)");

    AnalyticCheck out;
    out.k_needed = 0.0;
    for (double t : t_list) {
        double lhs, theta;
        if (t == 0.0) {
            lhs = n0;
            theta = 0.0;
        } else if (t == T) {
            lhs = nT;
            theta = std::pow(1.0 / angle.r, angle.phi);
        } else {
            const Field ut = propagate_kolmogorov(model, u0, t, cfg);
            lhs = norm_l2_mu(ut, density.rho);
            theta = std::pow(t / (angle.r * T), angle.phi);
        }
        const double ratio = lhs / (std::pow(n0, 1.0 - theta) * std::pow(nT, theta));
        out.ratios.push_back(ratio);
        out.k_needed = std::max(out.k_needed, ratio);
    }
    out.pass = out.k_needed <= k_cap;
    return out;
}

// ---- stability bounds -----------------------------------------------------

double stability_bound_analytic(double eta, const AngleReport& angle, double p,
                                double alpha, double K) {
    if (!(eta > 0.0 && eta < 1.0))
        throw DomainError("stability_bound_analytic: eta must lie in (0,1)");
    if (!(p > 1.0)) throw DomainError("stability_bound_analytic: p must exceed 1");
    const double denom = std::pow(-angle.c_psi * p * std::log(eta), 1.0 / angle.phi) *
                         angle.phi;
    return K * std::pow(gamma_fn(1.0 / angle.phi) / denom, alpha);
}

double stability_bound_fractional(double eta, double C, double C1) {
    if (!(eta > 0.0) || !(C1 > 0.0) || !(C1 * eta < 1.0))
        throw DomainError("stability_bound_fractional: need 0 < C1 eta < 1");
    return -C / std::log(C1 * eta);
}

HolderParams holder_defaults(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("holder_defaults: eps must lie in (0,1)");
    HolderParams h;
    h.p = 0.5 * (1.0 + 1.0 / (1.0 - eps));
    h.gamma = 0.5 * (1.0 - 1.0 / h.p);
    h.alpha = h.gamma / h.p;
    return h;
}

}  // namespace ou
