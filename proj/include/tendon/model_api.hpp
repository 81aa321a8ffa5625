#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tendon/dataset.hpp"
#include "tendon/numerics.hpp"

namespace tendon {

enum class Family {
    random_forest,
    gradient_boosting,
    ridge,
    lasso,
    svr,
    gpr,
    bnn,
    rnn,
};

Family family_from_string(const std::string& name);
std::string to_string(Family family);
const std::vector<Family>& all_families();

struct TrainingCurvePoint {
    int epoch = 0;       // 1-based
    double train_mae = 0.0;  // original length units
    double val_mae = 0.0;    // NaN when no validation set was given
};
using TrainingCurve = std::vector<TrainingCurvePoint>;

/// Fitted regressor core operating in standardized input/output space.
class Regressor {
  public:
    virtual ~Regressor() = default;
    /// X is n x 2 standardized; returns n x 3 standardized predictions.
    virtual Matrix predict_std(const Matrix& X) const = 0;
};

/// Family plus typed hyperparameters; unknown keys are rejected up front.
struct RegressorSpec {
    Family family;
    std::map<std::string, double> hyper;
    std::uint64_t seed = 0;

    explicit RegressorSpec(Family f, std::uint64_t seed = 0,
                           const std::map<std::string, double>& overrides = {});

    double get(const std::string& key) const;
    static const std::map<std::string, double>& defaults(Family family);
};

struct TrainedModel {
    Family family{};
    std::shared_ptr<const Regressor> impl;
    Scaler input_scaler;
    Scaler output_scaler;
    double fit_seconds = 0.0;  // core optimization only
    std::optional<TrainingCurve> curve;
    std::vector<std::string> warnings;
};

/// Column matrices over a dataset: X holds (alpha, beta), Y holds (l1, l2, l3).
Matrix dataset_inputs(const Dataset& ds);
Matrix dataset_targets(const Dataset& ds);
Matrix poses_to_matrix(const std::vector<PoseAngles>& poses);

/// Standardize by the training statistics, dispatch to the family fit and
/// wrap the result. Epoch-based families record a per-epoch MAE curve
/// against the (optionally empty) validation set.
TrainedModel fit(const RegressorSpec& spec, const Dataset& train, const Dataset& val);

std::vector<TendonDelta> predict(const TrainedModel& model,
                                 const std::vector<PoseAngles>& poses);

}  // namespace tendon
