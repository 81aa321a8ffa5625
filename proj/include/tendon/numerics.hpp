#pragma once

#include <Eigen/Dense>

#include "tendon/errors.hpp"

namespace tendon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Solve A x = b for symmetric positive definite A.
/// Throws NotPositiveDefinite when a Cholesky pivot is non-positive,
/// signalling the caller to raise its jitter.
Matrix cholesky_solve(const Matrix& A, const Matrix& b);

/// Minimize ||X W - Y||_F^2 via the normal equations with jitter
/// 1e-10 * trace(X^T X) / cols. Throws RankDeficient when the smallest
/// pivot falls below 1e-12 times the largest.
Matrix least_squares(const Matrix& X, const Matrix& Y);

/// sign(v) * max(|v| - t, 0)
inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

/// Per-column standardization with a std floor of 1e-12 for constant columns.
class Scaler {
  public:
    Scaler() = default;

    static Scaler fit(const Matrix& columns);

    Matrix transform(const Matrix& columns) const;
    Matrix inverse(const Matrix& columns) const;

    const Vector& means() const { return means_; }
    const Vector& stds() const { return stds_; }

  private:
    Vector means_;
    Vector stds_;
};

}  // namespace tendon
