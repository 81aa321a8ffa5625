#include "tendon/neural_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tendon {

namespace {

double mae_raw(const Matrix& pred_std, const Matrix& target_std, const Scaler& out_scaler) {
    const Matrix err = pred_std - target_std;
    return (err.array().rowwise() * out_scaler.stds().transpose().array())
        .abs()
        .mean();
}

/// Cosine decay from the base rate to 1e-4 over the configured epochs;
/// the noisy single-sample gradients need a small rate to settle late on.
double cosine_lr(double base, int epoch, int epochs) {
    if (epochs <= 1) return base;
    constexpr double kFloor = 1e-4;
    const double phase = M_PI * static_cast<double>(epoch - 1) / (epochs - 1);
    return kFloor + 0.5 * (base - kFloor) * (1.0 + std::cos(phase));
}

Vector xavier_init(const std::vector<int>& sizes, RngStream& rng) {
    DenseNet net = DenseNet::zeros(sizes);
    for (std::size_t l = 0; l < net.W.size(); ++l) {
        const double scale = std::sqrt(2.0 / (net.sizes[l] + net.sizes[l + 1]));
        for (Eigen::Index i = 0; i < net.W[l].rows(); ++i)
            for (Eigen::Index j = 0; j < net.W[l].cols(); ++j)
                net.W[l](i, j) = scale * rng.next_gaussian();
    }
    return net.flatten();
}

}  // namespace

// ---------------------------------------------------------------------------
// DenseNet
// ---------------------------------------------------------------------------

DenseNet DenseNet::zeros(const std::vector<int>& sizes) {
    DenseNet net;
    net.sizes = sizes;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        net.W.emplace_back(Matrix::Zero(sizes[l], sizes[l + 1]));
        net.b.emplace_back(Vector::Zero(sizes[l + 1]));
    }
    return net;
}

Matrix DenseNet::forward(const Matrix& X) const {
    Matrix a = X;
    for (std::size_t l = 0; l < W.size(); ++l) {
        a = (a * W[l]).rowwise() + b[l].transpose();
        if (l + 1 < W.size()) a = a.array().tanh();
    }
    return a;
}

Eigen::Index DenseNet::param_count() const {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < W.size(); ++l) n += W[l].size() + b[l].size();
    return n;
}

Vector DenseNet::flatten() const {
    Vector out(param_count());
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < W.size(); ++l) {
        out.segment(at, W[l].size()) = Eigen::Map<const Vector>(W[l].data(), W[l].size());
        at += W[l].size();
        out.segment(at, b[l].size()) = b[l];
        at += b[l].size();
    }
    return out;
}

void DenseNet::unflatten(const Vector& params) {
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < W.size(); ++l) {
        W[l] = Eigen::Map<const Matrix>(params.data() + at, W[l].rows(), W[l].cols());
        at += W[l].size();
        b[l] = params.segment(at, b[l].size());
        at += b[l].size();
    }
}

Vector NetGradients::flatten() const {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < dW.size(); ++l) n += dW[l].size() + db[l].size();
    Vector out(n);
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < dW.size(); ++l) {
        out.segment(at, dW[l].size()) = Eigen::Map<const Vector>(dW[l].data(), dW[l].size());
        at += dW[l].size();
        out.segment(at, db[l].size()) = db[l];
        at += db[l].size();
    }
    return out;
}

double net_loss_and_gradients(const DenseNet& net, const Matrix& X, const Matrix& Y,
                              NetGradients* grads) {
    const std::size_t layers = net.W.size();
    std::vector<Matrix> activations(layers + 1);
    activations[0] = X;
    for (std::size_t l = 0; l < layers; ++l) {
        Matrix z = (activations[l] * net.W[l]).rowwise() + net.b[l].transpose();
        activations[l + 1] = (l + 1 < layers) ? z.array().tanh().matrix() : z;
    }

    const double n = static_cast<double>(X.rows());
    const Matrix diff = activations[layers] - Y;
    const double loss = diff.squaredNorm() / (2.0 * n);
    if (!std::isfinite(loss)) throw NonFiniteLoss("non-finite forward loss");
    if (grads == nullptr) return loss;

    grads->dW.assign(layers, Matrix());
    grads->db.assign(layers, Vector());
    Matrix delta = diff / n;  // dLoss/dz at the output layer
    for (std::size_t l = layers; l-- > 0;) {
        grads->dW[l] = activations[l].transpose() * delta;
        grads->db[l] = delta.colwise().sum();
        if (l > 0) {
            delta = (delta * net.W[l].transpose()).array() *
                    (1.0 - activations[l].array().square());
        }
    }
    return loss;
}

void AdamOptimizer::step(Vector& params, const Vector& grad) {
    ++t_;
    m_ = 0.9 * m_ + 0.1 * grad;
    v_ = 0.999 * v_.array() + 0.001 * grad.array().square();
    const double bc1 = 1.0 - std::pow(0.9, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(0.999, static_cast<double>(t_));
    params.array() -= lr_ * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + 1e-8);
}

// ---------------------------------------------------------------------------
// BNN
// ---------------------------------------------------------------------------

double gaussian_kl_to_unit(const Vector& mu, const Vector& sigma) {
    return 0.5 * (sigma.array().square() + mu.array().square() - 1.0).sum() -
           sigma.array().log().sum();
}

Matrix BnnModel::predict(const Matrix& X) const {
    Matrix acc = mc_nets.front().forward(X);
    for (std::size_t s = 1; s < mc_nets.size(); ++s) acc += mc_nets[s].forward(X);
    return acc / static_cast<double>(mc_nets.size());
}

std::pair<Matrix, Matrix> BnnModel::predict_with_std(const Matrix& X) const {
    std::vector<Matrix> draws;
    draws.reserve(mc_nets.size());
    Matrix mean = Matrix::Zero(X.rows(), sizes.back());
    for (const DenseNet& net : mc_nets) {
        draws.push_back(net.forward(X));
        mean += draws.back();
    }
    mean /= static_cast<double>(draws.size());
    Matrix var = Matrix::Zero(mean.rows(), mean.cols());
    for (const Matrix& d : draws) var += (d - mean).array().square().matrix();
    var /= static_cast<double>(draws.size());
    return {mean, var.cwiseSqrt()};
}

std::pair<BnnModel, TrainingCurve> fit_bnn(const Matrix& Xtr, const Matrix& Ytr,
                                           const Matrix& Xval, const Matrix& Yval,
                                           const Scaler& out_scaler, const BnnConfig& cfg,
                                           std::uint64_t seed) {
    if (Xtr.rows() < 1) throw EmptyInput("fit_bnn needs training data");
    const Eigen::Index n_train = Xtr.rows();
    const double kl_weight =
        cfg.kl_weight > 0.0 ? cfg.kl_weight : 1.0 / static_cast<double>(n_train);
    const std::vector<int> sizes = {static_cast<int>(Xtr.cols()), cfg.hidden, cfg.hidden,
                                    static_cast<int>(Ytr.cols())};

    RngStream init_rng(seed, RngStream::derive(seed, "bnn_init", 0));
    DenseNet shape = DenseNet::zeros(sizes);
    const Eigen::Index np = shape.param_count();
    const double rho_max = std::log(cfg.sigma_max);
    Vector mu = xavier_init(sizes, init_rng);
    Vector rho = Vector::Constant(np, std::min(std::log(0.05), rho_max));

    Vector params(2 * np);
    params << mu, rho;
    AdamOptimizer adam(2 * np, cfg.lr);

    RngStream shuffle_rng(seed, RngStream::derive(seed, "bnn_shuffle", 0));
    RngStream sample_rng(seed, RngStream::derive(seed, "bnn_sample", 0));

    auto mc_draws = [&](const Vector& mu_now, const Vector& rho_now) {
        std::vector<DenseNet> nets;
        RngStream pred_rng(seed, RngStream::derive(seed, "bnn_predict", 0));
        const Vector sigma = rho_now.array().exp();
        for (int s = 0; s < cfg.mc_predict; ++s) {
            Vector eps(np);
            for (Eigen::Index k = 0; k < np; ++k) eps[k] = pred_rng.next_gaussian();
            DenseNet net = DenseNet::zeros(sizes);
            net.unflatten(mu_now + sigma.cwiseProduct(eps));
            nets.push_back(std::move(net));
        }
        return nets;
    };

    std::vector<Eigen::Index> order(n_train);
    for (Eigen::Index i = 0; i < n_train; ++i) order[i] = i;

    TrainingCurve curve;
    DenseNet work = DenseNet::zeros(sizes);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        adam.set_lr(cosine_lr(cfg.lr, epoch, cfg.epochs));
        for (Eigen::Index i = n_train; i > 1; --i) {
            const auto j = static_cast<Eigen::Index>(shuffle_rng.next_uniform() * i);
            std::swap(order[i - 1], order[j]);
        }
        for (Eigen::Index start = 0; start < n_train; start += cfg.batch) {
            const Eigen::Index count = std::min<Eigen::Index>(cfg.batch, n_train - start);
            Matrix Xb(count, Xtr.cols()), Yb(count, Ytr.cols());
            for (Eigen::Index k = 0; k < count; ++k) {
                Xb.row(k) = Xtr.row(order[start + k]);
                Yb.row(k) = Ytr.row(order[start + k]);
            }

            const Vector mu_now = params.head(np);
            const Vector rho_now = params.tail(np);
            const Vector sigma = rho_now.array().exp();
            Vector eps(np);
            for (Eigen::Index k = 0; k < np; ++k) eps[k] = sample_rng.next_gaussian();

            work.unflatten(mu_now + sigma.cwiseProduct(eps));
            NetGradients g;
            const double data_loss = net_loss_and_gradients(work, Xb, Yb, &g);
            if (!std::isfinite(data_loss)) throw FitDiverged("BNN loss diverged");
            // The likelihood enters the ELBO as a sum over the batch, so the
            // mean-loss gradients are rescaled by the batch size.
            const Vector dw = static_cast<double>(count) * g.flatten();

            Vector grad(2 * np);
            grad.head(np) = dw + kl_weight * mu_now;
            grad.tail(np) = dw.cwiseProduct(eps).cwiseProduct(sigma) +
                            kl_weight * (sigma.array().square() - 1.0).matrix();
            adam.step(params, grad);
            // Projected step: keep the variational stds inside the family.
            for (Eigen::Index k = np; k < 2 * np; ++k)
                params[k] = std::min(params[k], rho_max);
        }

        BnnModel snapshot;
        snapshot.sizes = sizes;
        snapshot.mu = params.head(np);
        snapshot.rho = params.tail(np);
        snapshot.mc_nets = mc_draws(snapshot.mu, snapshot.rho);
        TrainingCurvePoint pt;
        pt.epoch = epoch;
        pt.train_mae = mae_raw(snapshot.predict(Xtr), Ytr, out_scaler);
        pt.val_mae = Xval.rows() > 0
                         ? mae_raw(snapshot.predict(Xval), Yval, out_scaler)
                         : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(pt.train_mae)) throw FitDiverged("BNN training MAE diverged");
        curve.push_back(pt);
    }

    BnnModel model;
    model.sizes = sizes;
    model.mu = params.head(np);
    model.rho = params.tail(np);
    model.mc_nets = mc_draws(model.mu, model.rho);
    return {std::move(model), std::move(curve)};
}

// ---------------------------------------------------------------------------
// RNN
// ---------------------------------------------------------------------------

Matrix RnnModel::forward_sequence(const Matrix& Xseq) const {
    const Eigen::Index steps = Xseq.rows();
    Matrix out(steps, Why.cols());
    Vector h = Vector::Zero(Whh.rows());
    for (Eigen::Index t = 0; t < steps; ++t) {
        h = (Wxh.transpose() * Xseq.row(t).transpose() + Whh.transpose() * h + bh)
                .array()
                .tanh();
        out.row(t) = (Why.transpose() * h + by).transpose();
    }
    return out;
}

Matrix RnnModel::predict(const Matrix& X) const {
    Matrix out(X.rows(), Why.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double a = X(i, 0);
        const double b = X(i, 1);
        Vector h = Vector::Zero(Whh.rows());
        Vector x(2);
        for (Eigen::Index c = 0; c < beta_context.size(); ++c) {
            if (beta_context[c] >= b - 1e-9) break;
            x << a, beta_context[c];
            h = (Wxh.transpose() * x + Whh.transpose() * h + bh).array().tanh();
        }
        x << a, b;
        h = (Wxh.transpose() * x + Whh.transpose() * h + bh).array().tanh();
        out.row(i) = (Why.transpose() * h + by).transpose();
    }
    return out;
}

Eigen::Index RnnModel::param_count() const {
    return Wxh.size() + Whh.size() + Why.size() + bh.size() + by.size();
}

Vector RnnModel::flatten() const {
    Vector out(param_count());
    Eigen::Index at = 0;
    for (const Matrix* m : {&Wxh, &Whh, &Why}) {
        out.segment(at, m->size()) = Eigen::Map<const Vector>(m->data(), m->size());
        at += m->size();
    }
    out.segment(at, bh.size()) = bh;
    at += bh.size();
    out.segment(at, by.size()) = by;
    return out;
}

void RnnModel::unflatten(const Vector& params) {
    Eigen::Index at = 0;
    for (Matrix* m : {&Wxh, &Whh, &Why}) {
        *m = Eigen::Map<const Matrix>(params.data() + at, m->rows(), m->cols());
        at += m->size();
    }
    bh = params.segment(at, bh.size());
    at += bh.size();
    by = params.segment(at, by.size());
}

double rnn_loss_and_gradients(const RnnModel& net, const Matrix& Xseq, const Matrix& Yseq,
                              Vector* grad_flat) {
    const Eigen::Index steps = Xseq.rows();
    const Eigen::Index H = net.Whh.rows();

    std::vector<Vector> hs(steps + 1, Vector::Zero(H));
    Matrix out(steps, net.Why.cols());
    for (Eigen::Index t = 0; t < steps; ++t) {
        hs[t + 1] = (net.Wxh.transpose() * Xseq.row(t).transpose() +
                     net.Whh.transpose() * hs[t] + net.bh)
                        .array()
                        .tanh();
        out.row(t) = (net.Why.transpose() * hs[t + 1] + net.by).transpose();
    }

    const double n = static_cast<double>(steps);
    const Matrix diff = out - Yseq;
    const double loss = diff.squaredNorm() / (2.0 * n);
    if (!std::isfinite(loss)) throw NonFiniteLoss("non-finite RNN loss");
    if (grad_flat == nullptr) return loss;

    Matrix dWxh = Matrix::Zero(net.Wxh.rows(), net.Wxh.cols());
    Matrix dWhh = Matrix::Zero(H, H);
    Matrix dWhy = Matrix::Zero(net.Why.rows(), net.Why.cols());
    Vector dbh = Vector::Zero(H);
    Vector dby = Vector::Zero(net.by.size());

    Vector dh_next = Vector::Zero(H);
    for (Eigen::Index t = steps - 1; t >= 0; --t) {
        const Vector dy = diff.row(t).transpose() / n;
        dWhy += hs[t + 1] * dy.transpose();
        dby += dy;
        Vector dh = net.Why * dy + dh_next;
        const Vector dz = dh.array() * (1.0 - hs[t + 1].array().square());
        dWxh += Xseq.row(t).transpose() * dz.transpose();
        dWhh += hs[t] * dz.transpose();
        dbh += dz;
        dh_next = net.Whh * dz;
    }

    Vector flat(net.param_count());
    Eigen::Index at = 0;
    for (const Matrix* m : {&dWxh, &dWhh, &dWhy}) {
        flat.segment(at, m->size()) = Eigen::Map<const Vector>(m->data(), m->size());
        at += m->size();
    }
    flat.segment(at, dbh.size()) = dbh;
    at += dbh.size();
    flat.segment(at, dby.size()) = dby;
    *grad_flat = flat;
    return loss;
}

std::vector<SequenceView> build_sequences(const Dataset& ds, const Scaler& in_scaler,
                                          const Scaler& out_scaler) {
    if (!ds.meta.grid_ordered)
        throw MissingOrderingMetadata("RNN sequences need a grid-generated dataset");
    for (const Sample& s : ds.samples)
        if (s.alpha_index < 0 || s.beta_index < 0)
            throw MissingOrderingMetadata("sample lacks grid coordinates");

    // Key (replicate, alpha row) -> samples; order each by beta ascending.
    std::vector<std::size_t> order(ds.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Sample& sa = ds.samples[a];
        const Sample& sb = ds.samples[b];
        if (sa.replicate != sb.replicate) return sa.replicate < sb.replicate;
        if (sa.alpha_index != sb.alpha_index) return sa.alpha_index < sb.alpha_index;
        return sa.beta_index < sb.beta_index;
    });

    std::vector<SequenceView> seqs;
    std::size_t at = 0;
    while (at < order.size()) {
        std::size_t end = at + 1;
        while (end < order.size() &&
               ds.samples[order[end]].replicate == ds.samples[order[at]].replicate &&
               ds.samples[order[end]].alpha_index == ds.samples[order[at]].alpha_index)
            ++end;
        SequenceView seq;
        seq.X.resize(static_cast<Eigen::Index>(end - at), 2);
        seq.Y.resize(static_cast<Eigen::Index>(end - at), 3);
        for (std::size_t k = at; k < end; ++k) {
            const Sample& s = ds.samples[order[k]];
            seq.X.row(static_cast<Eigen::Index>(k - at)) << s.pose.alpha, s.pose.beta;
            seq.Y.row(static_cast<Eigen::Index>(k - at)) << s.cmd.l1, s.cmd.l2, s.cmd.l3;
        }
        seq.X = in_scaler.transform(seq.X);
        seq.Y = out_scaler.transform(seq.Y);
        seqs.push_back(std::move(seq));
        at = end;
    }
    return seqs;
}

std::pair<RnnModel, TrainingCurve> fit_rnn(const std::vector<SequenceView>& train_seqs,
                                           const Matrix& Xtr, const Matrix& Ytr,
                                           const Matrix& Xval, const Matrix& Yval,
                                           const Scaler& out_scaler, const RnnConfig& cfg,
                                           std::uint64_t seed) {
    if (train_seqs.empty()) throw EmptyInput("fit_rnn needs training sequences");
    const int inputs = static_cast<int>(train_seqs.front().X.cols());
    const int outputs = static_cast<int>(train_seqs.front().Y.cols());

    RnnModel net;
    net.beta_context = cfg.beta_context;
    net.Wxh = Matrix::Zero(inputs, cfg.hidden);
    net.Whh = Matrix::Zero(cfg.hidden, cfg.hidden);
    net.Why = Matrix::Zero(cfg.hidden, outputs);
    net.bh = Vector::Zero(cfg.hidden);
    net.by = Vector::Zero(outputs);

    RngStream init_rng(seed, RngStream::derive(seed, "rnn_init", 0));
    Vector params = net.flatten();
    {
        const double sx = std::sqrt(2.0 / (inputs + cfg.hidden));
        const double sh = 0.5 / std::sqrt(static_cast<double>(cfg.hidden));
        const double sy = std::sqrt(2.0 / (cfg.hidden + outputs));
        Eigen::Index at = 0;
        for (Eigen::Index k = 0; k < net.Wxh.size(); ++k)
            params[at++] = sx * init_rng.next_gaussian();
        for (Eigen::Index k = 0; k < net.Whh.size(); ++k)
            params[at++] = sh * init_rng.next_gaussian();
        for (Eigen::Index k = 0; k < net.Why.size(); ++k)
            params[at++] = sy * init_rng.next_gaussian();
        // biases stay zero
    }
    net.unflatten(params);

    AdamOptimizer adam(params.size(), cfg.lr);
    RngStream shuffle_rng(seed, RngStream::derive(seed, "rnn_shuffle", 0));
    std::vector<std::size_t> order(train_seqs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainingCurve curve;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        adam.set_lr(cosine_lr(cfg.lr, epoch, cfg.epochs));
        for (std::size_t i = order.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(shuffle_rng.next_uniform() * i);
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t s : order) {
            Vector grad;
            const double loss =
                rnn_loss_and_gradients(net, train_seqs[s].X, train_seqs[s].Y, &grad);
            if (!std::isfinite(loss)) throw FitDiverged("RNN loss diverged");
            adam.step(params, grad);
            net.unflatten(params);
        }
        TrainingCurvePoint pt;
        pt.epoch = epoch;
        pt.train_mae = mae_raw(net.predict(Xtr), Ytr, out_scaler);
        pt.val_mae = Xval.rows() > 0 ? mae_raw(net.predict(Xval), Yval, out_scaler)
                                     : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(pt.train_mae)) throw FitDiverged("RNN training MAE diverged");
        curve.push_back(pt);
    }
    return {std::move(net), std::move(curve)};
}

}  // namespace tendon
