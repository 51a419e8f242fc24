#include "doctest.h"

#include <cmath>

#include "ou/matops.hpp"
#include "test_util.hpp"

using namespace ou;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

// Quadrature oracle for Q_inf: composite Simpson of e^{tB} Q e^{tB^T} on
// [0, horizon], independent of the Lyapunov solve under test.
Eigen::MatrixXd qinf_quadrature(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                                double horizon, int steps) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(B.rows(), B.cols());
    const double h = horizon / steps;
    auto f = [&](double t) {
        const Eigen::MatrixXd E = expm(B, t);
        return Eigen::MatrixXd(E * Q * E.transpose());
    };
    for (int i = 0; i < steps; ++i) {
        const double a = i * h;
        acc += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
    }
    return acc;
}

}  // namespace

TEST_CASE("expm basics") {
    CHECK((expm(mat2(0, 1, -1, 0), 0.0) - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);

    // rotation closed form e^{tB} = [[cos t, sin t], [-sin t, cos t]]
    const double t = 1.5707963267948966;
    const Eigen::MatrixXd R = expm(mat2(0, 1, -1, 0), t);
    CHECK((R - mat2(std::cos(t), std::sin(t), -std::sin(t), std::cos(t))).norm() <
          1e-12);

    CHECK(expm(scalar(-1.0), 2.0)(0, 0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("expm semigroup law on random 2x2") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::MatrixXd B(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) B(i, j) = rng.uniform(-3.0, 3.0);
        const double t = rng.uniform(0.0, 1.5), u = rng.uniform(0.0, 1.5);
        const Eigen::MatrixXd lhs = expm(B, t) * expm(B, u);
        const Eigen::MatrixXd rhs = expm(B, t + u);
        CHECK((lhs - rhs).norm() < 1e-11 * std::max(1.0, rhs.norm()));
    }
}

TEST_CASE("is_hurwitz closed forms") {
    CHECK(is_hurwitz(-Eigen::MatrixXd::Identity(2, 2)));
    CHECK_FALSE(is_hurwitz(mat2(0, 1, -1, 0)));  // eigenvalues +-i
    CHECK(is_hurwitz(mat2(-1, 10, 0, -1)));      // triangular, -1 twice
    CHECK(is_hurwitz(scalar(-0.5)));
    CHECK_FALSE(is_hurwitz(scalar(0.0)));
}

TEST_CASE("gramian_qt examples") {
    const OUModel m1(scalar(1.0), scalar(-1.0), 1.0);
    CHECK(gramian_qt(m1, 0.0).norm() == 0.0);
    CHECK(gramian_qt(m1, 1.0)(0, 0) ==
          doctest::Approx(0.5 * (1.0 - std::exp(-2.0))).epsilon(1e-11));

    const OUModel m2(Eigen::MatrixXd::Identity(2, 2), -Eigen::MatrixXd::Identity(2, 2), 1.0);
    const Eigen::MatrixXd big = gramian_qt(m2, 30.0);
    CHECK((big - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-8);
}

TEST_CASE("gramian_qinf examples and errors") {
    const OUModel m2(Eigen::MatrixXd::Identity(2, 2), -Eigen::MatrixXd::Identity(2, 2), 1.0);
    CHECK((gramian_qinf(m2) - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);

    const OUModel m1(scalar(1.0), scalar(-0.7), 1.0);
    CHECK(gramian_qinf(m1)(0, 0) == doctest::Approx(1.0 / 1.4).epsilon(1e-14));

    const OUModel skew(Eigen::MatrixXd::Identity(2, 2), mat2(0, 1, -1, 0), 1.0);
    CHECK_THROWS_AS((void)gramian_qinf(skew), HurwitzViolation);
}

TEST_CASE("gramian semigroup decomposition Q_{t1+t2}") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::MatrixXd B = outest::random_hurwitz(rng, 2);
        const Eigen::MatrixXd Q = outest::random_spd(rng, 2);
        const OUModel m(Q, B, 1.0);
        const double t1 = rng.uniform(0.05, 1.0), t2 = rng.uniform(0.05, 1.0);
        const Eigen::MatrixXd lhs = gramian_qt(m, t1 + t2);
        const Eigen::MatrixXd E = expm(B, t1);
        const Eigen::MatrixXd rhs = gramian_qt(m, t1) + E * gramian_qt(m, t2) * E.transpose();
        CHECK((lhs - rhs).norm() < 1e-9);
    }
}

TEST_CASE("gramian converges to the Lyapunov solution") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd B = outest::random_hurwitz(rng, 2);
        const Eigen::MatrixXd Q = outest::random_spd(rng, 2);
        const OUModel m(Q, B, 1.0);
        const double horizon = 30.0 / std::abs(max_real_eigenvalue(B));
        CHECK((gramian_qt(m, horizon) - gramian_qinf(m)).norm() < 1e-8);
    }
}

TEST_CASE("analyticity angle: self-adjoint and diagonal cases") {
    const double half_pi = 1.5707963267948966;

    const OUModel m(Eigen::MatrixXd::Identity(2, 2), -Eigen::MatrixXd::Identity(2, 2), 1.0);
    AngleReport rep = analyticity_angle(m);
    CHECK(rep.psi == doctest::Approx(half_pi).epsilon(1e-14));
    CHECK(rep.r == 1.0);
    CHECK(rep.phi == 1.0);
    CHECK(rep.c_psi == 1.0);

    const OUModel md(Eigen::MatrixXd::Identity(2, 2), mat2(-1, 0, 0, -2), 1.0);
    CHECK(analyticity_angle(md).psi == doctest::Approx(half_pi).epsilon(1e-14));
}

TEST_CASE("analyticity angle: non-normal drift vs quadrature oracle") {
    const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd B = mat2(-1, 1, 0, -1);
    const OUModel m(Q, B, 1.0);
    const AngleReport rep = analyticity_angle(m);

    // oracle: quadrature Gramian to horizon 50 + spectral norm by
    // eigen-decomposition of M^T M
    const Eigen::MatrixXd qinf = qinf_quadrature(B, Q, 50.0, 4000);
    const Eigen::MatrixXd M = 0.5 * Eigen::MatrixXd::Identity(2, 2) + qinf * B.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.transpose() * M);
    const double cot_psi = 2.0 * std::sqrt(es.eigenvalues().maxCoeff());
    const double psi_oracle = std::atan2(1.0, cot_psi);

    CHECK(rep.psi < 1.5707963267948966);
    CHECK(rep.psi == doctest::Approx(psi_oracle).epsilon(1e-8));
    // closed-form cross-check of this particular model: cot psi = 1/2
    CHECK(rep.psi == doctest::Approx(std::atan(2.0)).epsilon(1e-12));
    CHECK(rep.r == doctest::Approx(2.0 * std::cos(0.5 * rep.psi)));
    CHECK(rep.phi == doctest::Approx(1.5707963267948966 * 2.0 / rep.psi));
}

TEST_CASE("angle report invariants over random Hurwitz models") {
    Rng rng(47);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng.integer(2));
        const Eigen::MatrixXd B = outest::random_hurwitz(rng, n);
        const Eigen::MatrixXd Q = outest::random_spd(rng, n);
        const OUModel m(Q, B, 1.0);
        const AngleReport rep = analyticity_angle(m);

        CHECK(lyapunov_residual(B, Q, rep.q_inf) < 1e-10);
        CHECK(rep.psi > 0.0);
        CHECK(rep.psi <= 1.5707963267948966);
        CHECK(rep.r >= 1.0);
        CHECK(rep.phi >= 1.0);
        // exact identity, bitwise
        CHECK(rep.c_psi == std::pow(1.0 / rep.r, rep.phi));
        if (rep.psi == 1.5707963267948966) {
            CHECK(rep.r == 1.0);
            CHECK(rep.phi == 1.0);
            CHECK(rep.c_psi == 1.0);
        }
    }
}
