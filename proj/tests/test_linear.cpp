#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tendon/linear_models.hpp"
#include "tendon/rng.hpp"

using namespace tendon;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    RngStream rng(seed, 31);
    Matrix X(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) X(i, j) = rng.next_gaussian();
    return X;
}

}  // namespace

TEST_CASE("ridge at lambda 0 matches the least-squares oracle") {
    const Matrix X = random_matrix(60, 4, 1);
    Matrix W_true(4, 2);
    W_true << 2, -1, 0.5, 3, -2, 0.25, 1, 1;
    const Matrix Y = (X * W_true).rowwise() + Eigen::RowVector2d(5.0, -3.0);

    const LinearModel m = fit_ridge(X, Y, 0.0);
    CHECK((m.weights - W_true).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(m.intercept[0] == doctest::Approx(5.0).epsilon(1e-8));
    CHECK(m.intercept[1] == doctest::Approx(-3.0).epsilon(1e-8));
    CHECK((m.predict(X) - Y).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("ridge solution satisfies the regularized normal equations") {
    const Matrix X = random_matrix(50, 3, 2);
    const Matrix Y = random_matrix(50, 2, 3);
    const double lambda = 2.5;
    const LinearModel m = fit_ridge(X, Y, lambda);

    // Stationarity on centered data: Xc^T (Yc - Xc W) = lambda W.
    const Matrix Xc = X.rowwise() - X.colwise().mean();
    const Matrix Yc = Y.rowwise() - Y.colwise().mean();
    const Matrix grad = Xc.transpose() * (Yc - Xc * m.weights) - lambda * m.weights;
    CHECK(grad.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("ridge perturbation optimality") {
    // The fitted weights minimize the ridge objective: any perturbation
    // in a random direction increases it.
    const Matrix X = random_matrix(40, 3, 4);
    const Matrix Y = random_matrix(40, 1, 5);
    const double lambda = 1.0;
    const LinearModel m = fit_ridge(X, Y, lambda);
    const Matrix Xc = X.rowwise() - X.colwise().mean();
    const Matrix Yc = Y.rowwise() - Y.colwise().mean();
    auto objective = [&](const Matrix& W) {
        return 0.5 * (Yc - Xc * W).squaredNorm() + 0.5 * lambda * W.squaredNorm();
    };
    const double base = objective(m.weights);
    RngStream rng(6, 32);
    for (int t = 0; t < 20; ++t) {
        Matrix dir(3, 1);
        for (int i = 0; i < 3; ++i) dir(i, 0) = rng.next_gaussian();
        CHECK(objective(m.weights + 1e-3 * dir) > base);
        CHECK(objective(m.weights - 1e-3 * dir) > base);
    }
}

TEST_CASE("lasso at lambda 0 matches least squares within 1e-5") {
    const Matrix X = random_matrix(80, 4, 7);
    Matrix W_true(4, 3);
    W_true << 1, 0, 2, -1, 3, 0.5, 2, -2, 1, 0.25, 1, -0.5;
    const Matrix Y = (X * W_true).rowwise() + Eigen::RowVector3d(1.0, 2.0, 3.0);

    const LinearModel lasso = fit_lasso(X, Y, 0.0);
    const LinearModel ls = fit_ridge(X, Y, 0.0);
    CHECK((lasso.weights - ls.weights).cwiseAbs().maxCoeff() < 1e-5);
    CHECK((lasso.intercept - ls.intercept).cwiseAbs().maxCoeff() < 1e-5);
    CHECK_FALSE(lasso.max_iter_exceeded);
}

TEST_CASE("lasso zeroes everything at lambda above the critical value") {
    const Matrix X = random_matrix(50, 3, 8);
    const Matrix Y = random_matrix(50, 2, 9);
    const Matrix Xc = X.rowwise() - X.colwise().mean();
    const Matrix Yc = Y.rowwise() - Y.colwise().mean();
    const double lambda_max = (Xc.transpose() * Yc).cwiseAbs().maxCoeff();

    const LinearModel m = fit_lasso(X, Y, 1.01 * lambda_max);
    CHECK(m.weights.cwiseAbs().maxCoeff() == 0.0);
    // Intercept still tracks the target means.
    CHECK((m.intercept.transpose() - Y.colwise().mean()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lasso recovers a planted sparse solution") {
    // y depends only on the first feature; a small penalty should keep the
    // first coefficient near 3 and drive the second exactly to zero.
    const Matrix X = random_matrix(100, 2, 10);
    const Matrix Y = 3.0 * X.col(0);
    const LinearModel m = fit_lasso(X, Y, 0.5);
    CHECK(std::abs(m.weights(0, 0) - 3.0) < 0.1);
    CHECK(m.weights(1, 0) == 0.0);
}

TEST_CASE("lasso objective decreases monotonically with extra sweeps") {
    const Matrix X = random_matrix(60, 5, 11);
    const Matrix Y = random_matrix(60, 2, 12);
    const double lambda = 5.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int iters : {1, 2, 5, 20, 200}) {
        const LinearModel m = fit_lasso(X, Y, lambda, 0.0, iters);
        const double obj = lasso_objective(X, Y, m);
        CHECK(obj <= prev + 1e-12);
        prev = obj;
    }
    // tol = 0 forces the sweep budget to be exhausted.
    CHECK(fit_lasso(X, Y, lambda, 0.0, 1).max_iter_exceeded);
}

TEST_CASE("lasso final objective field matches the standalone evaluation") {
    const Matrix X = random_matrix(40, 3, 13);
    const Matrix Y = random_matrix(40, 2, 14);
    const LinearModel m = fit_lasso(X, Y, 1.5);
    CHECK(m.final_objective == doctest::Approx(lasso_objective(X, Y, m)).epsilon(1e-10));
}

TEST_CASE("linear fits reject inconsistent shapes") {
    const Matrix X = random_matrix(10, 2, 15);
    const Matrix Y = random_matrix(9, 1, 16);
    CHECK_THROWS_AS(fit_ridge(X, Y, 1.0), LengthMismatch);
    CHECK_THROWS_AS(fit_lasso(X, Y, 1.0), LengthMismatch);
    CHECK_THROWS_AS(fit_ridge(X, random_matrix(10, 1, 17), -1.0), ConfigError);
    CHECK_THROWS_AS(fit_lasso(X, random_matrix(10, 1, 18), -1.0), ConfigError);
}
