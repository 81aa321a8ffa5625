#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tendon/distill.hpp"
#include "tendon/model_api.hpp"

namespace tendon {

/// Elementwise over all outputs and samples.
double mse(const std::vector<TendonDelta>& pred, const std::vector<TendonDelta>& actual);
double mae(const std::vector<TendonDelta>& pred, const std::vector<TendonDelta>& actual);

struct EvalRow {
    std::string model;
    bool failed = false;
    std::string error;
    double mse = 0.0;
    double mae = 0.0;
    double fit_seconds = 0.0;
    double mse_per_output[3] = {0.0, 0.0, 0.0};
    double mae_per_output[3] = {0.0, 0.0, 0.0};
};

struct EvalReport {
    std::vector<EvalRow> rows;
    // Fitted models and curves keyed by family name; failed rows are absent.
    std::map<std::string, TrainedModel> models;
};

/// Fit each spec on train, evaluate on validation. Sub-100 ms fits are
/// repeated three times and the median wall-clock time is reported.
/// Per-model failures become row-level errors without aborting other rows.
EvalReport run_benchmark(const std::vector<RegressorSpec>& specs, const Dataset& train,
                         const Dataset& val);

/// CSV with header model,mse,mae,fit_seconds,mse_l1,mse_l2,mse_l3,mae_l1,mae_l2,mae_l3
void write_report_csv(const EvalReport& report, const std::string& path);

struct DeviationRow {
    PoseAngles target;
    PoseAngles achieved;
    double dev_alpha = 0.0;
    double dev_beta = 0.0;
};

struct DeviationReport {
    std::vector<DeviationRow> rows;
    double mean_abs_alpha = 0.0;
    double mean_abs_beta = 0.0;
    double max_abs_alpha = 0.0;
    double max_abs_beta = 0.0;
};

using Controller = std::function<TendonDelta(const PoseAngles&)>;

/// Alpha sweep with beta = 0 followed by a beta sweep with alpha = 0,
/// -90..90 at an interval of 10 (38 targets).
std::vector<PoseAngles> alternating_sweep();

/// Run the controller open-loop on the noise-free plant at each target and
/// record achieved-minus-target deviations.
DeviationReport validate_controller(const Controller& controller, const PlantParams& params,
                                    const std::vector<PoseAngles>& targets);

Controller controller_from_tf(const TransferFunction& tf);
Controller analytical_controller();

/// CSV: target_alpha,target_beta,achieved_alpha,achieved_beta,dev_alpha,dev_beta
void write_deviation_csv(const DeviationReport& report, const std::string& path);

/// One CSV (epoch,train_mae,val_mae) and one SVG per named curve.
void export_curves(const std::map<std::string, TrainingCurve>& curves,
                   const std::string& directory);

}  // namespace tendon
