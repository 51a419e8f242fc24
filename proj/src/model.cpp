#include "ou/model.hpp"

#include <cmath>

#include "ou/matops.hpp"

namespace ou {

OUModel::OUModel(Eigen::MatrixXd Q, Eigen::MatrixXd B, double s)
    : q_(std::move(Q)), b_(std::move(B)), s_(s) {
    const auto n = q_.rows();
    if (n < 1 || n > 2 || q_.cols() != n)
        throw ConfigError("OUModel: dimension must be 1 or 2 and Q square");
    if (b_.rows() != n || b_.cols() != n)
        throw ConfigError("OUModel: B must match the dimension of Q");
    if (!(s_ > 0.0))
        throw ConfigError("OUModel: fractional order s must be positive");

    const double asym = (q_ - q_.transpose()).norm();
    if (asym > 1e-12 * (1.0 + q_.norm()))
        throw ConfigError("OUModel: Q must be symmetric");
    q_ = 0.5 * (q_ + q_.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q_);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw ConfigError("OUModel: Q must be positive definite");

    if (b_.cwiseAbs().maxCoeff() == 0.0)
        throw ConfigError("OUModel: drift B must be nonzero");

    const Eigen::VectorXd sq = es.eigenvalues().cwiseSqrt();
    sqrt_q_ = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose();
    inv_sqrt_q_ =
        es.eigenvectors() * sq.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();

    hurwitz_ = is_hurwitz(b_);
}

}  // namespace ou
