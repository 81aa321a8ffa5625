#include "tendon/kernel_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace tendon {

double RbfKernel::operator()(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) const {
    const double d2 = (a - b).squaredNorm();
    return sigma_f2 * std::exp(-0.5 * d2 / (lengthscale * lengthscale));
}

Matrix RbfKernel::gram(const Matrix& X) const { return cross(X, X); }

Matrix RbfKernel::cross(const Matrix& A, const Matrix& B) const {
    const Vector a2 = A.rowwise().squaredNorm();
    const Vector b2 = B.rowwise().squaredNorm();
    Matrix D2 = (-2.0 * A * B.transpose()).colwise() + a2;
    D2.rowwise() += b2.transpose();
    return sigma_f2 *
           (-0.5 * D2.cwiseMax(0.0) / (lengthscale * lengthscale)).array().exp().matrix();
}

double median_pairwise_distance(const Matrix& X) {
    const Eigen::Index n = X.rows();
    if (n < 2) return 1.0;
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            dists.push_back((X.row(i) - X.row(j)).norm());
    const std::size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
    return std::max(dists[mid], 1e-12);
}

// ---------------------------------------------------------------------------
// SVR
// ---------------------------------------------------------------------------

Vector SvrModel::predict(const Matrix& Xq) const {
    return kernel.cross(Xq, X) * beta + Vector::Constant(Xq.rows(), bias);
}

double SvrModel::dual_objective(const Vector& y) const {
    const Matrix K = kernel.gram(X);
    return -0.5 * beta.dot(K * beta) + beta.dot(y) - epsilon * beta.cwiseAbs().sum();
}

namespace {

// Piecewise-quadratic objective change when moving beta_i by +t, beta_j by -t.
double pair_step_cost(double t, double eta, double gi, double gj, double eps, double bi,
                      double bj) {
    return 0.5 * eta * t * t + (gi - gj) * t +
           eps * (std::abs(bi + t) - std::abs(bi)) + eps * (std::abs(bj - t) - std::abs(bj));
}

}  // namespace

SvrModel fit_svr(const Matrix& X, const Vector& y, double C, double epsilon,
                 const RbfKernel& kernel, double tol, long max_iter) {
    if (C <= 0.0) throw ConfigError("svr C must be > 0");
    if (epsilon < 0.0) throw ConfigError("svr epsilon must be >= 0");
    const Eigen::Index n = X.rows();
    if (n < 1) throw EmptyInput("fit_svr needs at least one sample");

    SvrModel model;
    model.X = X;
    model.C = C;
    model.epsilon = epsilon;
    model.kernel = kernel;
    model.beta = Vector::Zero(n);

    const Matrix K = kernel.gram(X);
    Vector G = -y;  // K beta - y

    constexpr double kInf = std::numeric_limits<double>::infinity();
    double violation = kInf;
    for (long iter = 0; iter < max_iter; ++iter) {
        // Working pair: steepest feasible ascent/descent directions under the
        // sum-zero constraint (directional subgradients of the kinked dual).
        int best_up = -1, best_dn = -1;
        double max_up = -kInf, min_dn = kInf;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double b = model.beta[i];
            if (b < C) {  // increasing beta_i is feasible
                const double d = G[i] + (b >= 0.0 ? epsilon : -epsilon);
                if (-d > max_up) {
                    max_up = -d;
                    best_up = static_cast<int>(i);
                }
            }
            if (b > -C) {  // decreasing beta_i is feasible
                const double d = G[i] + (b > 0.0 ? epsilon : -epsilon);
                if (-d < min_dn) {
                    min_dn = -d;
                    best_dn = static_cast<int>(i);
                }
            }
        }
        violation = max_up - min_dn;
        if (violation < tol || best_up < 0 || best_dn < 0 || best_up == best_dn) break;

        const int i = best_up, j = best_dn;
        const double bi = model.beta[i], bj = model.beta[j];
        const double eta = K(i, i) + K(j, j) - 2.0 * K(i, j);
        const double t_max = std::min(C - bi, bj + C);

        // Candidate steps: kink crossings, the box edge and the per-region
        // unconstrained minimizers of the piecewise quadratic.
        std::vector<double> candidates{t_max};
        if (bi < 0.0 && -bi < t_max) candidates.push_back(-bi);
        if (bj > 0.0 && bj < t_max) candidates.push_back(bj);
        if (eta > 1e-12) {
            for (double si : {-1.0, 1.0})
                for (double sj : {-1.0, 1.0}) {
                    const double t =
                        -(G[i] - G[j] + epsilon * (si - sj)) / eta;
                    if (t > 0.0 && t < t_max) candidates.push_back(t);
                }
        }
        double best_t = 0.0, best_cost = 0.0;
        for (double t : candidates) {
            const double cost = pair_step_cost(t, eta, G[i], G[j], epsilon, bi, bj);
            if (cost < best_cost - 1e-15) {
                best_cost = cost;
                best_t = t;
            }
        }
        if (best_t <= 0.0) break;  // numerically stuck; violation reported below

        model.beta[i] += best_t;
        model.beta[j] -= best_t;
        G += best_t * (K.col(i) - K.col(j));

        if (iter == max_iter - 1) model.max_iter_exceeded = true;
    }
    model.final_kkt_violation = violation;
    if (violation >= tol && !model.max_iter_exceeded) model.max_iter_exceeded = true;
    if (violation < tol) model.max_iter_exceeded = false;

    // Bias from KKT-interior points; fallback: midpoint of the feasible
    // interval implied by the bound constraints.
    double sum_b = 0.0;
    int interior = 0;
    double lo = -kInf, hi = kInf;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double b = model.beta[i];
        if (std::abs(b) > 1e-9 && std::abs(b) < C - 1e-9) {
            sum_b += (b > 0.0 ? -epsilon : epsilon) - G[i];
            ++interior;
        } else if (std::abs(b) <= 1e-9) {
            lo = std::max(lo, -epsilon - G[i]);
            hi = std::min(hi, epsilon - G[i]);
        } else if (b >= C - 1e-9) {
            hi = std::min(hi, -epsilon - G[i]);
        } else {
            lo = std::max(lo, epsilon - G[i]);
        }
    }
    if (interior > 0) {
        model.bias = sum_b / interior;
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
        model.bias = 0.5 * (lo + hi);
    } else if (std::isfinite(lo)) {
        model.bias = lo;
    } else if (std::isfinite(hi)) {
        model.bias = hi;
    }
    return model;
}

// ---------------------------------------------------------------------------
// GPR
// ---------------------------------------------------------------------------

Vector GprModel::predict(const Matrix& Xq) const {
    return kernel.cross(Xq, X) * weights;
}

std::pair<Vector, Vector> GprModel::predict_with_std(const Matrix& Xq) const {
    const Matrix Kqx = kernel.cross(Xq, X);
    const Vector mean = Kqx * weights;
    const Matrix V = chol_lower.triangularView<Eigen::Lower>().solve(Kqx.transpose());
    Vector var = Vector::Constant(Xq.rows(), kernel.sigma_f2) -
                 V.colwise().squaredNorm().transpose();
    var = var.cwiseMax(0.0);
    return {mean, var.cwiseSqrt()};
}

GprModel fit_gpr(const Matrix& X, const Vector& y, const RbfKernel& kernel, double jitter) {
    if (X.rows() < 1) throw EmptyInput("fit_gpr needs at least one sample");
    const Matrix K = kernel.gram(X);
    double j = jitter;
    while (true) {
        Matrix Kj = K;
        Kj.diagonal().array() += j;
        Eigen::LLT<Matrix> llt(Kj);
        if (llt.info() == Eigen::Success) {
            GprModel model;
            model.X = X;
            model.kernel = kernel;
            model.jitter = j;
            model.chol_lower = llt.matrixL();
            model.weights = llt.solve(y);
            return model;
        }
        j = j > 0.0 ? 10.0 * j : 1e-12;
        if (j > 1e-4) throw NotPositiveDefinite("GPR Gram matrix stayed indefinite at jitter 1e-4");
    }
}

}  // namespace tendon
