#pragma once

#include <utility>

#include "tendon/numerics.hpp"

namespace tendon {

/// k(x, x') = sigma_f2 * exp(-||x - x'||^2 / (2 lengthscale^2))
struct RbfKernel {
    double lengthscale = 1.0;
    double sigma_f2 = 1.0;

    double operator()(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) const;
    Matrix gram(const Matrix& X) const;
    Matrix cross(const Matrix& A, const Matrix& B) const;  // A rows vs B rows
};

/// Median pairwise Euclidean distance between rows (the median heuristic).
double median_pairwise_distance(const Matrix& X);

/// Epsilon-insensitive SVR solved in the dual with pairwise SMO-style
/// updates. beta holds alpha - alpha* per training point.
struct SvrModel {
    Matrix X;
    Vector beta;
    double bias = 0.0;
    double C = 10.0;
    double epsilon = 0.01;
    RbfKernel kernel;
    bool max_iter_exceeded = false;
    double final_kkt_violation = 0.0;

    Vector predict(const Matrix& Xq) const;
    /// -0.5 b^T K b + b^T y - eps ||b||_1, the maximized dual value.
    double dual_objective(const Vector& y) const;
};

SvrModel fit_svr(const Matrix& X, const Vector& y, double C, double epsilon,
                 const RbfKernel& kernel, double tol = 1e-3, long max_iter = 100000);

/// Gaussian process posterior with precomputed Cholesky factor and weights.
struct GprModel {
    Matrix X;
    RbfKernel kernel;
    double jitter = 1e-8;
    Matrix chol_lower;  // L with L L^T = K + jitter I
    Vector weights;     // (K + jitter I)^-1 y

    Vector predict(const Matrix& Xq) const;
    std::pair<Vector, Vector> predict_with_std(const Matrix& Xq) const;
};

/// Factorizes K + jitter I, escalating the jitter tenfold up to 1e-4 before
/// giving up with NotPositiveDefinite.
GprModel fit_gpr(const Matrix& X, const Vector& y, const RbfKernel& kernel,
                 double jitter = 1e-8);

}  // namespace tendon
