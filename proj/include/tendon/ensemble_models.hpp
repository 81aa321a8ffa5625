#pragma once

#include <cstdint>
#include <vector>

#include "tendon/numerics.hpp"

namespace tendon {

/// CART regression tree with vector-valued leaves (leaf = mean of its
/// training targets). Splits greedily by total variance reduction over all
/// outputs; candidate thresholds are midpoints between consecutive sorted
/// unique feature values; ties break to the lower feature index, then the
/// lower threshold.
struct RegressionTree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        Vector value;  // leaf mean, empty for internal nodes
    };
    std::vector<Node> nodes;  // nodes[0] is the root

    Vector predict_row(const Eigen::RowVectorXd& x) const;
    Matrix predict(const Matrix& X) const;
};

RegressionTree fit_tree(const Matrix& X, const Matrix& Y, int max_depth,
                        int min_samples_leaf);

/// Bagged trees; prediction is the per-output mean over trees.
struct ForestModel {
    std::vector<RegressionTree> trees;
    Matrix predict(const Matrix& X) const;
};

/// bootstrap=false fits every tree on the identity resample (test hook).
ForestModel fit_forest(const Matrix& X, const Matrix& Y, int n_trees, int max_depth,
                       int min_samples_leaf, std::uint64_t seed, bool bootstrap = true);

/// Stagewise squared-loss boosting: F0 = column means, each stage fits one
/// tree to the current residual matrix and adds learning_rate times it.
struct BoostedModel {
    Vector base;  // initial constant prediction per output
    double learning_rate = 0.05;
    std::vector<RegressionTree> stages;
    std::vector<double> staged_train_mse;  // after each stage
    Matrix predict(const Matrix& X) const;
};

BoostedModel fit_boosted(const Matrix& X, const Matrix& Y, int n_stages,
                         double learning_rate, int max_depth, int min_samples_leaf);

}  // namespace tendon
