#pragma once

#include "tendon/numerics.hpp"

namespace tendon {

/// Linear map with unpenalized intercept, fitted on centered data.
struct LinearModel {
    Matrix weights;    // d x m
    Vector intercept;  // m
    double lambda = 0.0;
    bool max_iter_exceeded = false;
    double final_objective = 0.0;  // lasso only

    Matrix predict(const Matrix& X) const;
};

/// W = (Xc^T Xc + lambda I)^-1 Xc^T Yc, intercept from the column means.
LinearModel fit_ridge(const Matrix& X, const Matrix& Y, double lambda);

/// Cyclic coordinate descent with soft-threshold updates on the objective
/// 0.5 ||Y - XW||_F^2 + lambda ||W||_1 (intercept unpenalized). Stops when
/// the largest coefficient change in a sweep drops below tol; exceeding
/// max_iter flags the model instead of failing.
LinearModel fit_lasso(const Matrix& X, const Matrix& Y, double lambda, double tol = 1e-6,
                      int max_iter = 10000);

/// Penalized objective of the lasso problem, used for monotonicity checks.
double lasso_objective(const Matrix& X, const Matrix& Y, const LinearModel& model);

}  // namespace tendon
