#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tendon/kernel_models.hpp"
#include "tendon/numerics.hpp"
#include "tendon/rng.hpp"

using namespace tendon;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    RngStream rng(seed, 51);
    Matrix X(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) X(i, j) = rng.next_gaussian();
    return X;
}

/// Independent solver for the SVR dual via the smooth split b = p - q with
/// p, q in [0, C]:
///   D(p, q) = -0.5 (p-q)^T K (p-q) + (p-q)^T y - eps 1^T (p+q),
/// subject to sum(p) - sum(q) = 0. Projected gradient ascent; the joint
/// projection clips (p - nu, q + nu) with nu found by bisection.
double svr_dual_oracle(const Matrix& K, const Vector& y, double C, double eps,
                       int iters) {
    const Eigen::Index n = y.size();
    Vector p = Vector::Zero(n), q = Vector::Zero(n);
    // Step size from a Gershgorin bound on the largest Gram eigenvalue.
    double lip = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) lip = std::max(lip, K.row(i).cwiseAbs().sum());
    const double eta = 1.0 / lip;
    auto clip = [C](const Eigen::ArrayXd& v) {
        return v.cwiseMax(0.0).cwiseMin(C);
    };
    for (int t = 0; t < iters; ++t) {
        const Vector g = y - K * (p - q);
        const Eigen::ArrayXd zp = p.array() + eta * (g.array() - eps);
        const Eigen::ArrayXd zq = q.array() + eta * (-g.array() - eps);
        double lo = -(zp.maxCoeff() + zq.maxCoeff()) - 2.0 * C;
        double hi = -lo;
        for (int it = 0; it < 100; ++it) {
            const double nu = 0.5 * (lo + hi);
            const double s = clip(zp - nu).sum() - clip(zq + nu).sum();
            (s > 0.0 ? lo : hi) = nu;
        }
        const double nu = 0.5 * (lo + hi);
        p = clip(zp - nu).matrix();
        q = clip(zq + nu).matrix();
    }
    const Vector b = p - q;
    return -0.5 * b.dot(K * b) + b.dot(y) - eps * b.cwiseAbs().sum();
}

}  // namespace

TEST_CASE("rbf kernel values by hand") {
    RbfKernel k{2.0, 3.0};
    Eigen::RowVectorXd a(2), b(2);
    a << 0, 0;
    b << 2, 0;
    CHECK(k(a, a) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(k(a, b) == doctest::Approx(3.0 * std::exp(-4.0 / 8.0)).epsilon(1e-14));

    const Matrix X = random_matrix(6, 2, 1);
    const Matrix G = k.gram(X);
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    for (int i = 0; i < 6; ++i) CHECK(G(i, i) == doctest::Approx(3.0).epsilon(1e-14));
    const Matrix Cx = k.cross(X.topRows(3), X);
    CHECK((Cx - G.topRows(3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("median pairwise distance on a hand-checkable set") {
    Matrix X(3, 1);
    X << 0, 1, 3;  // pairwise distances 1, 2, 3 -> median 2
    CHECK(median_pairwise_distance(X) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("svr with constant targets keeps all duals at zero") {
    const Matrix X = random_matrix(15, 2, 2);
    const Vector y = Vector::Constant(15, 4.2);
    const SvrModel m = fit_svr(X, y, 10.0, 0.1, RbfKernel{1.0, 1.0});
    CHECK(m.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.bias == doctest::Approx(4.2).epsilon(1e-12));
    CHECK((m.predict(X).array() - 4.2).abs().maxCoeff() < 1e-12);
}

TEST_CASE("svr interpolates a smooth target within the tube") {
    const Matrix X = random_matrix(40, 2, 3);
    Vector y(40);
    for (int i = 0; i < 40; ++i) y[i] = std::sin(X(i, 0)) + 0.5 * std::cos(X(i, 1));
    const double eps = 0.05;
    const SvrModel m = fit_svr(X, y, 100.0, eps, RbfKernel{1.5, 1.0}, 1e-4);
    CHECK_FALSE(m.max_iter_exceeded);
    const Vector p = m.predict(X);
    // With a generous C every training point ends inside the tube plus tol.
    CHECK((p - y).cwiseAbs().maxCoeff() < eps + 1e-3);
    // Duals respect the box and the bias-feasibility constraint.
    CHECK(m.beta.cwiseAbs().maxCoeff() <= 100.0 + 1e-12);
    CHECK(std::abs(m.beta.sum()) < 1e-9);
}

TEST_CASE("svr dual matches the projected-gradient oracle within 1e-3") {
    const Matrix X = random_matrix(30, 2, 4);
    Vector y(30);
    for (int i = 0; i < 30; ++i) y[i] = X(i, 0) * X(i, 0) - X(i, 1);
    const RbfKernel kernel{1.0, 1.0};
    const double C = 10.0, eps = 0.1;
    const SvrModel m = fit_svr(X, y, C, eps, kernel, 1e-5);

    const double fitted = m.dual_objective(y);
    const double oracle = svr_dual_oracle(kernel.gram(X), y, C, eps, 20000);
    // Both maximize the same concave dual; the solver must come out at
    // least as high as the oracle up to the tolerance.
    CHECK(fitted >= oracle - 1e-3);
    CHECK(std::abs(fitted - oracle) < 1e-3 * (1.0 + std::abs(oracle)));
}

TEST_CASE("svr flags an exhausted iteration budget") {
    const Matrix X = random_matrix(25, 2, 5);
    Vector y(25);
    for (int i = 0; i < 25; ++i) y[i] = std::sin(3.0 * X(i, 0));
    const SvrModel m = fit_svr(X, y, 50.0, 0.01, RbfKernel{0.5, 1.0}, 1e-12, 3);
    CHECK(m.max_iter_exceeded);
    CHECK(m.final_kkt_violation > 0.0);
}

TEST_CASE("gpr interpolates noise-free observations") {
    Matrix X(3, 1);
    X << -1, 0, 2;
    Vector y(3);
    y << 1.0, -0.5, 2.0;
    const GprModel m = fit_gpr(X, y, RbfKernel{1.0, 1.0});
    CHECK((m.predict(X) - y).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("gpr posterior mean matches the dense-inverse oracle") {
    const Matrix X = random_matrix(25, 2, 6);
    Vector y(25);
    for (int i = 0; i < 25; ++i) y[i] = std::sin(X(i, 0)) * std::cos(X(i, 1));
    const RbfKernel kernel{1.2, 1.0};
    const double jitter = 1e-8;
    const GprModel m = fit_gpr(X, y, kernel, jitter);

    Matrix K = kernel.gram(X);
    K.diagonal().array() += jitter;
    const Matrix Kinv = K.fullPivLu().inverse();  // independent dense path

    const Matrix Q = random_matrix(10, 2, 7);
    const Matrix Ks = kernel.cross(Q, X);
    const Vector oracle_mean = Ks * (Kinv * y);
    CHECK((m.predict(Q) - oracle_mean).cwiseAbs().maxCoeff() < 1e-9);

    const auto [mean, std] = m.predict_with_std(Q);
    CHECK((mean - oracle_mean).cwiseAbs().maxCoeff() < 1e-9);
    for (int i = 0; i < 10; ++i) {
        const double var =
            kernel(Q.row(i), Q.row(i)) - Ks.row(i) * (Kinv * Ks.row(i).transpose());
        CHECK(std[i] == doctest::Approx(std::sqrt(std::max(var, 0.0))).epsilon(1e-6));
    }
}

TEST_CASE("gpr uncertainty contracts at the data and recovers far away") {
    const Matrix X = random_matrix(20, 1, 8);
    Vector y(20);
    for (int i = 0; i < 20; ++i) y[i] = std::tanh(X(i, 0));
    const GprModel m = fit_gpr(X, y, RbfKernel{1.0, 2.0});

    const auto [mean_at_data, std_at_data] = m.predict_with_std(X);
    CHECK(std_at_data.maxCoeff() < 1e-3);

    Matrix far(1, 1);
    far << 100.0;
    const auto [mean_far, std_far] = m.predict_with_std(far);
    CHECK(std_far[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(std::abs(mean_far[0]) < 1e-6);  // reverts to the zero prior mean
}

TEST_CASE("gpr survives duplicated rows via the jitter") {
    Matrix X(4, 1);
    X << 1, 1, 2, 3;  // duplicate rows make the bare gram singular
    Vector y(4);
    y << 0.5, 0.5, 1.0, -1.0;
    const GprModel m = fit_gpr(X, y, RbfKernel{1.0, 1.0}, 1e-12);
    CHECK(m.jitter >= 1e-12);
    const Vector p = m.predict(X);
    CHECK(std::isfinite(p[0]));
    // Consistent observations at the duplicate are reproduced.
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-4));
}
