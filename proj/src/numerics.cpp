#include "tendon/numerics.hpp"

#include <Eigen/Cholesky>

namespace tendon {

Matrix cholesky_solve(const Matrix& A, const Matrix& b) {
    if (A.rows() != A.cols()) throw NotPositiveDefinite("matrix is not square");
    if (A.rows() != b.rows()) throw LengthMismatch("A and b row counts differ");
    const double scale = A.cwiseAbs().maxCoeff();
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + scale))
        throw NotPositiveDefinite("matrix is not symmetric");

    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("non-positive Cholesky pivot");
    return llt.solve(b);
}

Matrix least_squares(const Matrix& X, const Matrix& Y) {
    if (X.rows() != Y.rows()) throw LengthMismatch("X and Y row counts differ");
    if (X.rows() < X.cols()) throw RankDeficient("fewer rows than columns");

    Matrix G = X.transpose() * X;
    const double jitter = 1e-10 * G.trace() / static_cast<double>(X.cols());
    G.diagonal().array() += jitter;

    Eigen::LLT<Matrix> llt(G);
    if (llt.info() != Eigen::Success) throw RankDeficient("normal equations not factorizable");
    const Vector pivots = llt.matrixLLT().diagonal().cwiseAbs2();
    // Exactly collinear columns still factor because of the jitter, but the
    // trailing pivot collapses to the jitter scale (~1e-9 relative).
    if (pivots.minCoeff() < 1e-8 * pivots.maxCoeff())
        throw RankDeficient("design matrix is rank deficient");

    // One step of iterative refinement removes the jitter-induced bias,
    // which otherwise shows up as a ~1e-10 relative error in the solution.
    Matrix W = llt.solve(X.transpose() * Y);
    W += llt.solve(X.transpose() * (Y - X * W));
    return W;
}

Scaler Scaler::fit(const Matrix& columns) {
    if (columns.rows() < 2) throw EmptyInput("scaler fit needs at least 2 rows");
    Scaler s;
    const double n = static_cast<double>(columns.rows());
    s.means_ = columns.colwise().mean();
    Matrix centered = columns.rowwise() - s.means_.transpose();
    s.stds_ = (centered.array().square().colwise().sum() / n).sqrt().matrix().transpose();
    s.stds_ = s.stds_.cwiseMax(1e-12);
    return s;
}

Matrix Scaler::transform(const Matrix& columns) const {
    return (columns.rowwise() - means_.transpose()).array().rowwise() /
           stds_.transpose().array();
}

Matrix Scaler::inverse(const Matrix& columns) const {
    return (columns.array().rowwise() * stds_.transpose().array()).matrix().rowwise() +
           means_.transpose();
}

}  // namespace tendon
