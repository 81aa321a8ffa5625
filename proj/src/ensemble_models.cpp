#include "tendon/ensemble_models.hpp"

#include <algorithm>
#include <numeric>

#include "tendon/rng.hpp"

namespace tendon {

namespace {

struct Builder {
    const Matrix& X;
    const Matrix& Y;
    int max_depth;
    int min_samples_leaf;
    std::vector<RegressionTree::Node>& nodes;

    int build(std::vector<int>& idx, int lo, int hi, int depth) {
        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();

        const int count = hi - lo;
        Vector mean = Vector::Zero(Y.cols());
        for (int k = lo; k < hi; ++k) mean += Y.row(idx[k]).transpose();
        mean /= static_cast<double>(count);

        double sse = 0.0;
        for (int k = lo; k < hi; ++k)
            sse += (Y.row(idx[k]).transpose() - mean).squaredNorm();

        bool can_split = depth < max_depth && count >= 2 * min_samples_leaf && sse > 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = -1.0;  // SSE reduction; strictly positive to accept

        if (can_split) {
            std::vector<int> sorted(idx.begin() + lo, idx.begin() + hi);
            for (int f = 0; f < X.cols(); ++f) {
                std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
                    return X(a, f) < X(b, f);
                });
                // prefix sums of targets and squared norms over the sorted order
                Vector left_sum = Vector::Zero(Y.cols());
                double left_sq = 0.0;
                Vector total_sum = Vector::Zero(Y.cols());
                double total_sq = 0.0;
                for (int r : sorted) {
                    total_sum += Y.row(r).transpose();
                    total_sq += Y.row(r).squaredNorm();
                }
                for (int k = 0; k < count - 1; ++k) {
                    const int r = sorted[k];
                    left_sum += Y.row(r).transpose();
                    left_sq += Y.row(r).squaredNorm();
                    const double xv = X(r, f);
                    const double xn = X(sorted[k + 1], f);
                    if (xn <= xv) continue;  // not a boundary between distinct values
                    const int nl = k + 1;
                    const int nr = count - nl;
                    if (nl < min_samples_leaf || nr < min_samples_leaf) continue;
                    const Vector right_sum = total_sum - left_sum;
                    const double right_sq = total_sq - left_sq;
                    const double child_sse = left_sq - left_sum.squaredNorm() / nl +
                                             right_sq - right_sum.squaredNorm() / nr;
                    const double score = sse - child_sse;
                    const double threshold = 0.5 * (xv + xn);
                    if (score > best_score + 1e-12 ||
                        (std::abs(score - best_score) <= 1e-12 &&
                         (f < best_feature ||
                          (f == best_feature && threshold < best_threshold)))) {
                        best_score = score;
                        best_feature = f;
                        best_threshold = threshold;
                    }
                }
            }
        }

        if (best_feature < 0 || best_score <= 0.0) {
            nodes[node_id].value = mean;
            return node_id;
        }

        const auto mid_it = std::partition(idx.begin() + lo, idx.begin() + hi, [&](int r) {
            return X(r, best_feature) <= best_threshold;
        });
        const int mid = static_cast<int>(mid_it - idx.begin());
        nodes[node_id].feature = best_feature;
        nodes[node_id].threshold = best_threshold;
        const int left = build(idx, lo, mid, depth + 1);
        nodes[node_id].left = left;
        const int right = build(idx, mid, hi, depth + 1);
        nodes[node_id].right = right;
        return node_id;
    }
};

}  // namespace

Vector RegressionTree::predict_row(const Eigen::RowVectorXd& x) const {
    int node = 0;
    while (nodes[node].feature >= 0)
        node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                               : nodes[node].right;
    return nodes[node].value;
}

Matrix RegressionTree::predict(const Matrix& X) const {
    int leaf = 0;
    while (nodes[leaf].feature >= 0) leaf = nodes[leaf].left;
    Matrix out(X.rows(), nodes[leaf].value.size());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        out.row(i) = predict_row(X.row(i)).transpose();
    return out;
}

RegressionTree fit_tree(const Matrix& X, const Matrix& Y, int max_depth,
                        int min_samples_leaf) {
    if (X.rows() < 1) throw EmptyInput("fit_tree needs at least one sample");
    if (X.rows() != Y.rows()) throw LengthMismatch("X and Y row counts differ");
    RegressionTree tree;
    std::vector<int> idx(X.rows());
    std::iota(idx.begin(), idx.end(), 0);
    Builder{X, Y, max_depth, std::max(1, min_samples_leaf), tree.nodes}
        .build(idx, 0, static_cast<int>(idx.size()), 0);
    return tree;
}

Matrix ForestModel::predict(const Matrix& X) const {
    Matrix acc = trees.front().predict(X);
    for (std::size_t t = 1; t < trees.size(); ++t) acc += trees[t].predict(X);
    return acc / static_cast<double>(trees.size());
}

ForestModel fit_forest(const Matrix& X, const Matrix& Y, int n_trees, int max_depth,
                       int min_samples_leaf, std::uint64_t seed, bool bootstrap) {
    if (n_trees < 1) throw ConfigError("n_trees must be >= 1");
    const Eigen::Index n = X.rows();
    ForestModel forest;
    forest.trees.reserve(n_trees);
    for (int t = 0; t < n_trees; ++t) {
        Matrix Xb = X, Yb = Y;
        if (bootstrap) {
            RngStream rng(seed, RngStream::derive(seed, "forest", t));
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto r = static_cast<Eigen::Index>(rng.next_uniform() * n);
                Xb.row(i) = X.row(r);
                Yb.row(i) = Y.row(r);
            }
        }
        forest.trees.push_back(fit_tree(Xb, Yb, max_depth, min_samples_leaf));
    }
    return forest;
}

Matrix BoostedModel::predict(const Matrix& X) const {
    Matrix out = base.transpose().replicate(X.rows(), 1);
    for (const RegressionTree& tree : stages) out += learning_rate * tree.predict(X);
    return out;
}

BoostedModel fit_boosted(const Matrix& X, const Matrix& Y, int n_stages,
                         double learning_rate, int max_depth, int min_samples_leaf) {
    if (n_stages < 1) throw ConfigError("n_stages must be >= 1");
    if (!(learning_rate >= 0.0 && learning_rate <= 1.0))
        throw ConfigError("learning_rate must lie in [0, 1]");

    BoostedModel model;
    model.learning_rate = learning_rate;
    model.base = Y.colwise().mean();

    Matrix residual = Y.rowwise() - model.base.transpose();
    const double denom = static_cast<double>(Y.size());
    model.stages.reserve(n_stages);
    for (int s = 0; s < n_stages; ++s) {
        RegressionTree tree = fit_tree(X, residual, max_depth, min_samples_leaf);
        residual -= learning_rate * tree.predict(X);
        model.stages.push_back(std::move(tree));
        model.staged_train_mse.push_back(residual.squaredNorm() / denom);
    }
    return model;
}

}  // namespace tendon
