#include "tendon/model_api.hpp"

#include <chrono>
#include <cmath>

#include "tendon/ensemble_models.hpp"
#include "tendon/kernel_models.hpp"
#include "tendon/linear_models.hpp"
#include "tendon/neural_models.hpp"

namespace tendon {

namespace {

using Clock = std::chrono::steady_clock;

struct LinearRegressor : Regressor {
    LinearModel model;
    Matrix predict_std(const Matrix& X) const override { return model.predict(X); }
};

struct ForestRegressor : Regressor {
    ForestModel model;
    Matrix predict_std(const Matrix& X) const override { return model.predict(X); }
};

struct BoostedRegressor : Regressor {
    BoostedModel model;
    Matrix predict_std(const Matrix& X) const override { return model.predict(X); }
};

struct SvrRegressor : Regressor {
    std::vector<SvrModel> per_output;
    Matrix predict_std(const Matrix& X) const override {
        Matrix out(X.rows(), static_cast<Eigen::Index>(per_output.size()));
        for (std::size_t k = 0; k < per_output.size(); ++k)
            out.col(static_cast<Eigen::Index>(k)) = per_output[k].predict(X);
        return out;
    }
};

struct GprRegressor : Regressor {
    std::vector<GprModel> per_output;
    Matrix predict_std(const Matrix& X) const override {
        Matrix out(X.rows(), static_cast<Eigen::Index>(per_output.size()));
        for (std::size_t k = 0; k < per_output.size(); ++k)
            out.col(static_cast<Eigen::Index>(k)) = per_output[k].predict(X);
        return out;
    }
};

struct BnnRegressor : Regressor {
    BnnModel model;
    Matrix predict_std(const Matrix& X) const override { return model.predict(X); }
};

struct RnnRegressor : Regressor {
    RnnModel model;
    Matrix predict_std(const Matrix& X) const override { return model.predict(X); }
};

double validation_mae(const Regressor& reg, const Matrix& Xval, const Matrix& Yval,
                      const Scaler& out_scaler) {
    const Matrix err = reg.predict_std(Xval) - Yval;
    return (err.array().rowwise() * out_scaler.stds().transpose().array()).abs().mean();
}

}  // namespace

Family family_from_string(const std::string& name) {
    if (name == "random_forest" || name == "rf") return Family::random_forest;
    if (name == "gradient_boosting" || name == "gb") return Family::gradient_boosting;
    if (name == "ridge") return Family::ridge;
    if (name == "lasso") return Family::lasso;
    if (name == "svr") return Family::svr;
    if (name == "gpr") return Family::gpr;
    if (name == "bnn") return Family::bnn;
    if (name == "rnn") return Family::rnn;
    throw ConfigError("unknown model family '" + name + "'");
}

std::string to_string(Family family) {
    switch (family) {
        case Family::random_forest: return "random_forest";
        case Family::gradient_boosting: return "gradient_boosting";
        case Family::ridge: return "ridge";
        case Family::lasso: return "lasso";
        case Family::svr: return "svr";
        case Family::gpr: return "gpr";
        case Family::bnn: return "bnn";
        case Family::rnn: return "rnn";
    }
    throw ConfigError("invalid family enum value");
}

const std::vector<Family>& all_families() {
    static const std::vector<Family> families = {
        Family::random_forest, Family::gradient_boosting, Family::ridge, Family::lasso,
        Family::svr,           Family::gpr,               Family::bnn,   Family::rnn};
    return families;
}

const std::map<std::string, double>& RegressorSpec::defaults(Family family) {
    static const std::map<Family, std::map<std::string, double>> all = {
        {Family::ridge, {{"lambda", 1.0}, {"tune", 0.0}}},
        {Family::lasso,
         {{"lambda", 0.01}, {"tol", 1e-6}, {"max_iter", 10000.0}, {"tune", 0.0}}},
        {Family::random_forest,
         {{"n_trees", 100.0}, {"max_depth", 12.0}, {"min_samples_leaf", 2.0},
          {"bootstrap", 1.0}}},
        {Family::gradient_boosting,
         {{"n_stages", 200.0}, {"learning_rate", 0.05}, {"max_depth", 3.0},
          {"min_samples_leaf", 1.0}}},
        {Family::svr,
         {{"C", 10.0}, {"epsilon", 0.01}, {"tol", 1e-3}, {"max_iter", 100000.0},
          {"lengthscale", 0.0}}},
        {Family::gpr, {{"jitter", 1e-8}, {"lengthscale", 0.0}}},
        {Family::bnn,
         {{"epochs", 100.0}, {"lr", 1e-2}, {"batch", 32.0}, {"kl_weight", 0.0},
          {"mc_predict", 30.0}, {"hidden", 32.0}, {"sigma_max", 0.002}}},
        {Family::rnn, {{"epochs", 100.0}, {"lr", 1e-2}, {"hidden", 32.0}}},
    };
    return all.at(family);
}

RegressorSpec::RegressorSpec(Family f, std::uint64_t s,
                             const std::map<std::string, double>& overrides)
    : family(f), hyper(defaults(f)), seed(s) {
    for (const auto& [key, value] : overrides) {
        auto it = hyper.find(key);
        if (it == hyper.end())
            throw UnknownHyperparameter("unknown hyperparameter '" + key + "' for " +
                                        to_string(f));
        it->second = value;
    }
}

double RegressorSpec::get(const std::string& key) const {
    auto it = hyper.find(key);
    if (it == hyper.end())
        throw UnknownHyperparameter("unknown hyperparameter '" + key + "'");
    return it->second;
}

Matrix dataset_inputs(const Dataset& ds) {
    Matrix X(static_cast<Eigen::Index>(ds.samples.size()), 2);
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
        X.row(static_cast<Eigen::Index>(i)) << ds.samples[i].pose.alpha,
            ds.samples[i].pose.beta;
    return X;
}

Matrix dataset_targets(const Dataset& ds) {
    Matrix Y(static_cast<Eigen::Index>(ds.samples.size()), 3);
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
        Y.row(static_cast<Eigen::Index>(i)) << ds.samples[i].cmd.l1, ds.samples[i].cmd.l2,
            ds.samples[i].cmd.l3;
    return Y;
}

Matrix poses_to_matrix(const std::vector<PoseAngles>& poses) {
    Matrix X(static_cast<Eigen::Index>(poses.size()), 2);
    for (std::size_t i = 0; i < poses.size(); ++i)
        X.row(static_cast<Eigen::Index>(i)) << poses[i].alpha, poses[i].beta;
    return X;
}

TrainedModel fit(const RegressorSpec& spec, const Dataset& train, const Dataset& val) {
    if (train.samples.empty()) throw EmptyInput("fit needs a non-empty training set");

    TrainedModel out;
    out.family = spec.family;
    out.input_scaler = Scaler::fit(dataset_inputs(train));
    out.output_scaler = Scaler::fit(dataset_targets(train));

    const Matrix Xtr = out.input_scaler.transform(dataset_inputs(train));
    const Matrix Ytr = out.output_scaler.transform(dataset_targets(train));
    Matrix Xval(0, 2), Yval(0, 3);
    if (!val.samples.empty()) {
        Xval = out.input_scaler.transform(dataset_inputs(val));
        Yval = out.output_scaler.transform(dataset_targets(val));
    }

    static const Vector lambda_grid =
        (Vector(5) << 1e-3, 1e-2, 1e-1, 1.0, 10.0).finished();

    const auto t0 = Clock::now();
    switch (spec.family) {
        case Family::ridge:
        case Family::lasso: {
            const bool lasso = spec.family == Family::lasso;
            auto fit_one = [&](double lambda) {
                return lasso ? fit_lasso(Xtr, Ytr, lambda, spec.get("tol"),
                                         static_cast<int>(spec.get("max_iter")))
                             : fit_ridge(Xtr, Ytr, lambda);
            };
            auto reg = std::make_shared<LinearRegressor>();
            if (spec.get("tune") != 0.0 && Xval.rows() > 0) {
                double best_mae = std::numeric_limits<double>::infinity();
                for (double lambda : lambda_grid) {
                    LinearRegressor cand;
                    cand.model = fit_one(lambda);
                    const double mae = validation_mae(cand, Xval, Yval, out.output_scaler);
                    if (mae < best_mae) {
                        best_mae = mae;
                        reg->model = std::move(cand.model);
                    }
                }
            } else {
                reg->model = fit_one(spec.get("lambda"));
            }
            if (reg->model.max_iter_exceeded)
                out.warnings.push_back("lasso hit max_iter, final objective " +
                                       std::to_string(reg->model.final_objective));
            out.impl = reg;
            break;
        }
        case Family::random_forest: {
            auto reg = std::make_shared<ForestRegressor>();
            reg->model = fit_forest(Xtr, Ytr, static_cast<int>(spec.get("n_trees")),
                                    static_cast<int>(spec.get("max_depth")),
                                    static_cast<int>(spec.get("min_samples_leaf")), spec.seed,
                                    spec.get("bootstrap") != 0.0);
            out.impl = reg;
            break;
        }
        case Family::gradient_boosting: {
            auto reg = std::make_shared<BoostedRegressor>();
            reg->model = fit_boosted(Xtr, Ytr, static_cast<int>(spec.get("n_stages")),
                                     spec.get("learning_rate"),
                                     static_cast<int>(spec.get("max_depth")),
                                     static_cast<int>(spec.get("min_samples_leaf")));
            out.impl = reg;
            break;
        }
        case Family::svr: {
            RbfKernel kernel;
            kernel.lengthscale = spec.get("lengthscale") > 0.0
                                     ? spec.get("lengthscale")
                                     : median_pairwise_distance(Xtr);
            kernel.sigma_f2 = 1.0;
            auto reg = std::make_shared<SvrRegressor>();
            for (Eigen::Index k = 0; k < Ytr.cols(); ++k) {
                reg->per_output.push_back(
                    fit_svr(Xtr, Ytr.col(k), spec.get("C"), spec.get("epsilon"), kernel,
                            spec.get("tol"), static_cast<long>(spec.get("max_iter"))));
                if (reg->per_output.back().max_iter_exceeded)
                    out.warnings.push_back(
                        "svr output " + std::to_string(k) + " hit max_iter, KKT violation " +
                        std::to_string(reg->per_output.back().final_kkt_violation));
            }
            out.impl = reg;
            break;
        }
        case Family::gpr: {
            RbfKernel kernel;
            kernel.lengthscale = spec.get("lengthscale") > 0.0
                                     ? spec.get("lengthscale")
                                     : median_pairwise_distance(Xtr);
            auto reg = std::make_shared<GprRegressor>();
            for (Eigen::Index k = 0; k < Ytr.cols(); ++k) {
                const Vector y = Ytr.col(k);
                RbfKernel kk = kernel;
                kk.sigma_f2 = std::max(y.squaredNorm() / static_cast<double>(y.size()) -
                                           std::pow(y.mean(), 2),
                                       1e-12);
                reg->per_output.push_back(fit_gpr(Xtr, y, kk, spec.get("jitter")));
            }
            out.impl = reg;
            break;
        }
        case Family::bnn: {
            BnnConfig cfg;
            cfg.epochs = static_cast<int>(spec.get("epochs"));
            cfg.lr = spec.get("lr");
            cfg.batch = static_cast<int>(spec.get("batch"));
            cfg.kl_weight = spec.get("kl_weight");
            cfg.mc_predict = static_cast<int>(spec.get("mc_predict"));
            cfg.hidden = static_cast<int>(spec.get("hidden"));
            cfg.sigma_max = spec.get("sigma_max");
            auto reg = std::make_shared<BnnRegressor>();
            auto [model, curve] =
                fit_bnn(Xtr, Ytr, Xval, Yval, out.output_scaler, cfg, spec.seed);
            reg->model = std::move(model);
            out.curve = std::move(curve);
            out.impl = reg;
            break;
        }
        case Family::rnn: {
            RnnConfig cfg;
            cfg.epochs = static_cast<int>(spec.get("epochs"));
            cfg.lr = spec.get("lr");
            cfg.hidden = static_cast<int>(spec.get("hidden"));
            {
                // Standardized sweep betas; the canonical prediction context.
                const GridSpec& grid = train.meta.grid;
                std::vector<double> betas;
                for (double b = grid.min_deg; b <= grid.max_deg + 1e-9; b += grid.step)
                    betas.push_back(b);
                Matrix ctx(static_cast<Eigen::Index>(betas.size()), 2);
                for (std::size_t i = 0; i < betas.size(); ++i)
                    ctx.row(static_cast<Eigen::Index>(i)) << 0.0, betas[i];
                cfg.beta_context = out.input_scaler.transform(ctx).col(1);
            }
            const auto seqs = build_sequences(train, out.input_scaler, out.output_scaler);
            auto reg = std::make_shared<RnnRegressor>();
            auto [model, curve] =
                fit_rnn(seqs, Xtr, Ytr, Xval, Yval, out.output_scaler, cfg, spec.seed);
            reg->model = std::move(model);
            out.curve = std::move(curve);
            out.impl = reg;
            break;
        }
    }
    const auto t1 = Clock::now();
    out.fit_seconds =
        std::max(std::chrono::duration<double>(t1 - t0).count(), 1e-9);
    return out;
}

std::vector<TendonDelta> predict(const TrainedModel& model,
                                 const std::vector<PoseAngles>& poses) {
    if (poses.empty()) return {};
    for (const PoseAngles& p : poses)
        if (!std::isfinite(p.alpha) || !std::isfinite(p.beta))
            throw NonFiniteInput("predict: non-finite pose");
    const Matrix X = model.input_scaler.transform(poses_to_matrix(poses));
    const Matrix Y = model.output_scaler.inverse(model.impl->predict_std(X));
    std::vector<TendonDelta> out(poses.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out[i] = {Y(r, 0), Y(r, 1), Y(r, 2)};
    }
    return out;
}

}  // namespace tendon
