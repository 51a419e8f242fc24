#include "ou/matops.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "ou/errors.hpp"

namespace ou {

Eigen::MatrixXd expm(const Eigen::MatrixXd& B, double t) {
    if (t == 0.0) return Eigen::MatrixXd::Identity(B.rows(), B.cols());
    return (t * B).exp();
}

double max_real_eigenvalue(const Eigen::MatrixXd& B) {
    if (B.rows() == 1) return B(0, 0);
    if (B.rows() == 2) {
        const double tr = B.trace();
        const double det = B.determinant();
        const double disc = tr * tr - 4.0 * det;
        if (disc >= 0.0) return 0.5 * (tr + std::sqrt(disc));
        return 0.5 * tr;  // complex conjugate pair
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(B);
    return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Eigen::MatrixXd& B) {
    return max_real_eigenvalue(B) < 0.0;
}

double spectral_norm(const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues()(0);
}

double lyapunov_residual(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                         const Eigen::MatrixXd& X) {
    return (B * X + X * B.transpose() + Q).norm();
}

namespace {

// Adaptive Simpson on matrix-valued integrands, absolute tolerance in the
// max-abs entry sense.
using MatFn = std::function<Eigen::MatrixXd(double)>;

Eigen::MatrixXd simpson_slice(double a, double b, const Eigen::MatrixXd& fa,
                              const Eigen::MatrixXd& fm, const Eigen::MatrixXd& fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

Eigen::MatrixXd adaptive_step(const MatFn& f, double a, double b,
                              const Eigen::MatrixXd& fa, const Eigen::MatrixXd& fm,
                              const Eigen::MatrixXd& fb, const Eigen::MatrixXd& whole,
                              double tol, int depth) {
    const double m = 0.5 * (a + b);
    const Eigen::MatrixXd fl = f(0.5 * (a + m));
    const Eigen::MatrixXd fr = f(0.5 * (m + b));
    const Eigen::MatrixXd left = simpson_slice(a, m, fa, fl, fm);
    const Eigen::MatrixXd right = simpson_slice(m, b, fm, fr, fb);
    const Eigen::MatrixXd err = left + right - whole;
    if (err.cwiseAbs().maxCoeff() <= 15.0 * tol)
        return left + right + err / 15.0;
    if (depth <= 0)
        throw ConvergenceError("gramian quadrature: refinement cap reached before tolerance");
    return adaptive_step(f, a, m, fa, fl, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, fr, fb, right, 0.5 * tol, depth - 1);
}

Eigen::MatrixXd adaptive_simpson(const MatFn& f, double a, double b, double tol) {
    const Eigen::MatrixXd fa = f(a);
    const Eigen::MatrixXd fb = f(b);
    const Eigen::MatrixXd fm = f(0.5 * (a + b));
    const Eigen::MatrixXd whole = simpson_slice(a, b, fa, fm, fb);
    return adaptive_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

Eigen::MatrixXd gramian_qt(const OUModel& model, double t, double tol) {
    const int n = model.dim();
    if (t < 0.0) throw DomainError("gramian_qt: t must be nonnegative");
    if (t == 0.0) return Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd& Q = model.Q();
    const Eigen::MatrixXd& B = model.B();
    auto integrand = [&](double tau) -> Eigen::MatrixXd {
        const Eigen::MatrixXd E = expm(B, tau);
        return E * Q * E.transpose();
    };
    Eigen::MatrixXd G = adaptive_simpson(integrand, 0.0, t, tol);
    return 0.5 * (G + G.transpose());
}

Eigen::MatrixXd gramian_qinf(const OUModel& model) {
    model.require_hurwitz("gramian_qinf");
    const Eigen::MatrixXd& B = model.B();
    const Eigen::MatrixXd& Q = model.Q();
    const int n = model.dim();
    if (n == 1) return Eigen::MatrixXd::Constant(1, 1, -Q(0, 0) / (2.0 * B(0, 0)));

    // Unknowns (x11, x12, x22); rows are the distinct entries of BX + XB^T = -Q.
    Eigen::Matrix3d A;
    Eigen::Vector3d rhs;
    A << 2.0 * B(0, 0), 2.0 * B(0, 1), 0.0,
         B(1, 0), B(0, 0) + B(1, 1), B(0, 1),
         0.0, 2.0 * B(1, 0), 2.0 * B(1, 1);
    rhs << -Q(0, 0), -Q(0, 1), -Q(1, 1);
    const Eigen::Vector3d x = A.colPivHouseholderQr().solve(rhs);
    Eigen::MatrixXd X(2, 2);
    X << x(0), x(1), x(1), x(2);
    return X;
}

AngleReport analyticity_angle(const OUModel& model) {
    model.require_hurwitz("analyticity_angle");
    AngleReport rep;
    rep.q_inf = gramian_qinf(model);

    const int n = model.dim();
    const Eigen::MatrixXd M =
        0.5 * Eigen::MatrixXd::Identity(n, n) +
        model.inv_sqrt_Q() * rep.q_inf * model.B().transpose() * model.inv_sqrt_Q();
    double cot_psi = 2.0 * spectral_norm(M);
    if (cot_psi < 1e-13) cot_psi = 0.0;  // clamp roundoff so psi never exceeds pi/2

    constexpr double half_pi = 1.5707963267948966;
    if (cot_psi == 0.0) {
        rep.psi = half_pi;
        rep.r = 1.0;
        rep.phi = 1.0;
        rep.c_psi = 1.0;
    } else {
        rep.psi = std::atan2(1.0, cot_psi);
        rep.r = 2.0 * std::cos(0.5 * rep.psi);
        rep.phi = half_pi * 2.0 / rep.psi;
        rep.c_psi = std::pow(1.0 / rep.r, rep.phi);
    }
    return rep;
}

}  // namespace ou
