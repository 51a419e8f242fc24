#pragma once

#include <Eigen/Dense>

#include "ou/errors.hpp"

namespace ou {

/// Problem data for the drift-diffusion equation
///   d/dt u = -tr^s(-Q grad^2 u) + Bx . grad u
/// with constant symmetric positive-definite diffusion Q, nonzero drift B
/// and fractional order s > 0 (s = 1 is the classical case).
///
/// The matrix API is dimension-generic; construction restricts to N in {1,2},
/// the regime where desk-scale grids and closed-form eigenvalues apply.
class OUModel {
public:
    OUModel(Eigen::MatrixXd Q, Eigen::MatrixXd B, double s);

    int dim() const noexcept { return static_cast<int>(q_.rows()); }
    const Eigen::MatrixXd& Q() const noexcept { return q_; }
    const Eigen::MatrixXd& B() const noexcept { return b_; }
    double s() const noexcept { return s_; }

    /// Symmetric square root of Q (cached at construction).
    const Eigen::MatrixXd& sqrt_Q() const noexcept { return sqrt_q_; }
    /// Symmetric inverse square root of Q.
    const Eigen::MatrixXd& inv_sqrt_Q() const noexcept { return inv_sqrt_q_; }

    bool hurwitz() const noexcept { return hurwitz_; }
    double trace_B() const noexcept { return b_.trace(); }

    void require_hurwitz(const char* what) const {
        if (!hurwitz_)
            throw HurwitzViolation(std::string(what) +
                                   ": drift spectrum not contained in the open left half-plane");
    }

private:
    Eigen::MatrixXd q_;
    Eigen::MatrixXd b_;
    double s_;
    Eigen::MatrixXd sqrt_q_;
    Eigen::MatrixXd inv_sqrt_q_;
    bool hurwitz_;
};

/// Sector-of-analyticity report for the semigroup on the weighted space.
/// psi is the optimal angle; (r, phi, c_psi) are the interpolation
/// exponents attached to it, with c_psi = (1/r)^phi.
struct AngleReport {
    Eigen::MatrixXd q_inf;
    double psi = 0.0;
    double r = 1.0;
    double phi = 1.0;
    double c_psi = 1.0;
};

}  // namespace ou
