#include "tendon/linear_models.hpp"

namespace tendon {

Matrix LinearModel::predict(const Matrix& X) const {
    return (X * weights).rowwise() + intercept.transpose();
}

LinearModel fit_ridge(const Matrix& X, const Matrix& Y, double lambda) {
    if (lambda < 0.0) throw ConfigError("ridge lambda must be >= 0");
    if (X.rows() != Y.rows()) throw LengthMismatch("X and Y row counts differ");
    const Vector x_mean = X.colwise().mean();
    const Vector y_mean = Y.colwise().mean();
    const Matrix Xc = X.rowwise() - x_mean.transpose();
    const Matrix Yc = Y.rowwise() - y_mean.transpose();

    Matrix G = Xc.transpose() * Xc;
    G.diagonal().array() += lambda;

    LinearModel m;
    m.lambda = lambda;
    m.weights = cholesky_solve(G, Xc.transpose() * Yc);
    m.intercept = y_mean - m.weights.transpose() * x_mean;
    return m;
}

double lasso_objective(const Matrix& X, const Matrix& Y, const LinearModel& model) {
    const Matrix R = Y - model.predict(X);
    return 0.5 * R.squaredNorm() + model.lambda * model.weights.cwiseAbs().sum();
}

LinearModel fit_lasso(const Matrix& X, const Matrix& Y, double lambda, double tol,
                      int max_iter) {
    if (lambda < 0.0) throw ConfigError("lasso lambda must be >= 0");
    if (X.rows() != Y.rows()) throw LengthMismatch("X and Y row counts differ");
    const Eigen::Index d = X.cols();
    const Eigen::Index m = Y.cols();

    const Vector x_mean = X.colwise().mean();
    const Vector y_mean = Y.colwise().mean();
    const Matrix Xc = X.rowwise() - x_mean.transpose();
    const Matrix Yc = Y.rowwise() - y_mean.transpose();
    const Vector col_sq = Xc.colwise().squaredNorm();

    LinearModel model;
    model.lambda = lambda;
    model.weights = Matrix::Zero(d, m);

    Matrix residual = Yc;  // Yc - Xc * W, kept current per coordinate update
    int sweeps = 0;
    double max_change = tol + 1.0;
    while (max_change >= tol) {
        if (sweeps++ >= max_iter) {
            model.max_iter_exceeded = true;
            break;
        }
        max_change = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            for (Eigen::Index j = 0; j < d; ++j) {
                if (col_sq[j] <= 0.0) continue;
                const double old_w = model.weights(j, k);
                const double rho = Xc.col(j).dot(residual.col(k)) + col_sq[j] * old_w;
                const double new_w = soft_threshold(rho, lambda) / col_sq[j];
                if (new_w != old_w) {
                    residual.col(k) -= (new_w - old_w) * Xc.col(j);
                    model.weights(j, k) = new_w;
                    max_change = std::max(max_change, std::abs(new_w - old_w));
                }
            }
        }
    }

    model.intercept = y_mean - model.weights.transpose() * x_mean;
    model.final_objective = lasso_objective(Xc, Yc, [&] {
        LinearModel centered = model;
        centered.intercept = Vector::Zero(m);
        return centered;
    }());
    return model;
}

}  // namespace tendon
