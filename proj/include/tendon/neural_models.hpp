#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tendon/model_api.hpp"
#include "tendon/numerics.hpp"
#include "tendon/rng.hpp"

namespace tendon {

/// Fully connected net, tanh hidden layers, linear output, 64-bit weights.
struct DenseNet {
    std::vector<int> sizes;  // e.g. {2, 32, 32, 3}
    std::vector<Matrix> W;   // W[l] is sizes[l] x sizes[l+1]
    std::vector<Vector> b;

    static DenseNet zeros(const std::vector<int>& sizes);

    Matrix forward(const Matrix& X) const;

    Eigen::Index param_count() const;
    Vector flatten() const;
    void unflatten(const Vector& params);
};

struct NetGradients {
    std::vector<Matrix> dW;
    std::vector<Vector> db;

    Vector flatten() const;
};

/// Loss = (1 / (2n)) sum_i ||y_i - yhat_i||^2 over the batch.
/// Throws NonFiniteLoss when the loss is not finite.
double net_loss_and_gradients(const DenseNet& net, const Matrix& X, const Matrix& Y,
                              NetGradients* grads);

/// Adaptive moment estimation with decay 0.9 / 0.999 and epsilon 1e-8.
class AdamOptimizer {
  public:
    AdamOptimizer(Eigen::Index n, double lr) : lr_(lr), m_(Vector::Zero(n)), v_(Vector::Zero(n)) {}
    void step(Vector& params, const Vector& grad);
    void set_lr(double lr) { lr_ = lr; }

  private:
    double lr_;
    long t_ = 0;
    Vector m_;
    Vector v_;
};

// ---------------------------------------------------------------------------
// Bayesian neural network (mean-field Gaussian variational inference)
// ---------------------------------------------------------------------------

/// KL(N(mu, sigma^2) || N(0, 1)) summed over independent weights.
double gaussian_kl_to_unit(const Vector& mu, const Vector& sigma);

struct BnnModel {
    std::vector<int> sizes;
    Vector mu;
    Vector rho;  // std = exp(rho)
    std::vector<DenseNet> mc_nets;  // fixed-seed posterior draws used at prediction

    Matrix predict(const Matrix& X) const;  // Monte-Carlo mean
    std::pair<Matrix, Matrix> predict_with_std(const Matrix& X) const;
};

struct BnnConfig {
    int epochs = 100;
    double lr = 1e-2;
    int batch = 32;
    double kl_weight = 0.0;  // 0 means 1 / n_train
    int mc_predict = 30;
    int hidden = 32;
    // Upper bound on the posterior std (constrained variational family).
    // Unconstrained single-sample gradients let the KL term inflate sigma
    // far past the ELBO optimum, drowning predictions in weight noise.
    double sigma_max = 0.002;
};

std::pair<BnnModel, TrainingCurve> fit_bnn(const Matrix& Xtr, const Matrix& Ytr,
                                           const Matrix& Xval, const Matrix& Yval,
                                           const Scaler& out_scaler, const BnnConfig& cfg,
                                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Elman recurrent network
// ---------------------------------------------------------------------------

struct RnnModel {
    Matrix Wxh;  // input x hidden
    Matrix Whh;  // hidden x hidden
    Matrix Why;  // hidden x output
    Vector bh;
    Vector by;

    /// Standardized beta grid values, ascending; the sweep context replayed
    /// before each single-pose prediction. Empty means length-1 sequences.
    Vector beta_context;

    /// Per-step outputs over one sequence; hidden state starts at zero.
    Matrix forward_sequence(const Matrix& Xseq) const;
    /// Canonical single-pose prediction for pose (a, b): replay the training
    /// sweep at constant a over every context beta below b, then read the
    /// output at (a, b). Matches how training sequences were constructed.
    Matrix predict(const Matrix& X) const;

    Vector flatten() const;
    void unflatten(const Vector& params);
    Eigen::Index param_count() const;
};

/// Full backpropagation through time over one sequence; loss as in
/// net_loss_and_gradients with n = sequence length.
double rnn_loss_and_gradients(const RnnModel& net, const Matrix& Xseq, const Matrix& Yseq,
                              Vector* grad_flat);

struct SequenceView {
    Matrix X;  // steps x inputs, standardized
    Matrix Y;  // steps x outputs, standardized
};

/// Constant-alpha beta-ascending sweeps; one sequence per (replicate, row).
/// Throws MissingOrderingMetadata when the dataset was not grid-generated.
std::vector<SequenceView> build_sequences(const Dataset& ds, const Scaler& in_scaler,
                                          const Scaler& out_scaler);

struct RnnConfig {
    int epochs = 100;
    double lr = 1e-2;
    int hidden = 32;
    Vector beta_context;  // standardized sweep betas for canonical prediction
};

std::pair<RnnModel, TrainingCurve> fit_rnn(const std::vector<SequenceView>& train_seqs,
                                           const Matrix& Xtr, const Matrix& Ytr,
                                           const Matrix& Xval, const Matrix& Yval,
                                           const Scaler& out_scaler, const RnnConfig& cfg,
                                           std::uint64_t seed);

}  // namespace tendon
