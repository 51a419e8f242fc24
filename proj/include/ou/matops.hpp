#pragma once

#include <Eigen/Dense>

#include "ou/model.hpp"

namespace ou {

/// e^{tB} for small dense B (scaling-and-squaring, 1e-12 relative for N <= 2).
Eigen::MatrixXd expm(const Eigen::MatrixXd& B, double t);

/// True iff all eigenvalues of B have strictly negative real part.
/// Closed-form eigenvalue test for N <= 2.
bool is_hurwitz(const Eigen::MatrixXd& B);

/// Finite-horizon Gramian Q_t = int_0^t e^{tau B} Q e^{tau B^T} dtau,
/// adaptive composite Simpson to absolute tolerance `tol`.
Eigen::MatrixXd gramian_qt(const OUModel& model, double t, double tol = 1e-12);

/// Infinite-horizon Gramian: solves B X + X B^T = -Q on the symmetric
/// unknowns. Throws HurwitzViolation if the drift is not Hurwitz.
Eigen::MatrixXd gramian_qinf(const OUModel& model);

/// Sector angle psi with cot(psi) = 2 || I/2 + Q^{-1/2} Q_inf B^T Q^{-1/2} ||
/// (spectral norm), plus the exponents r, phi and c_psi = (1/r)^phi.
AngleReport analyticity_angle(const OUModel& model);

/// || B X + X B^T + Q || (Frobenius), the defect of X as a Gramian candidate.
double lyapunov_residual(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                         const Eigen::MatrixXd& X);

/// Spectral norm (largest singular value) of a small dense matrix.
double spectral_norm(const Eigen::MatrixXd& M);

/// Largest eigenvalue real part of B (closed form for N <= 2).
double max_real_eigenvalue(const Eigen::MatrixXd& B);

}  // namespace ou
