#include "tendon/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "tendon/svg.hpp"

namespace tendon {

namespace {

void check_pair(const std::vector<TendonDelta>& pred, const std::vector<TendonDelta>& actual) {
    if (pred.size() != actual.size()) throw LengthMismatch("prediction/actual size mismatch");
    if (pred.empty()) throw EmptyInput("no samples to score");
}

}  // namespace

double mse(const std::vector<TendonDelta>& pred, const std::vector<TendonDelta>& actual) {
    check_pair(pred, actual);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e1 = pred[i].l1 - actual[i].l1;
        const double e2 = pred[i].l2 - actual[i].l2;
        const double e3 = pred[i].l3 - actual[i].l3;
        acc += e1 * e1 + e2 * e2 + e3 * e3;
    }
    return acc / (3.0 * static_cast<double>(pred.size()));
}

double mae(const std::vector<TendonDelta>& pred, const std::vector<TendonDelta>& actual) {
    check_pair(pred, actual);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        acc += std::abs(pred[i].l1 - actual[i].l1) + std::abs(pred[i].l2 - actual[i].l2) +
               std::abs(pred[i].l3 - actual[i].l3);
    }
    return acc / (3.0 * static_cast<double>(pred.size()));
}

EvalReport run_benchmark(const std::vector<RegressorSpec>& specs, const Dataset& train,
                         const Dataset& val) {
    if (specs.empty()) throw EmptyInput("run_benchmark needs at least one spec");

    std::vector<PoseAngles> val_poses;
    std::vector<TendonDelta> val_actual;
    for (const Sample& s : val.samples) {
        val_poses.push_back(s.pose);
        val_actual.push_back(s.cmd);
    }

    EvalReport report;
    for (const RegressorSpec& spec : specs) {
        EvalRow row;
        row.model = to_string(spec.family);
        try {
            TrainedModel model = fit(spec, train, val);
            if (model.fit_seconds < 0.1) {
                // Median of three fits stabilizes the timing column.
                std::vector<double> times{model.fit_seconds};
                for (int r = 0; r < 2; ++r) times.push_back(fit(spec, train, val).fit_seconds);
                std::sort(times.begin(), times.end());
                model.fit_seconds = times[1];
            }
            row.fit_seconds = model.fit_seconds;

            const std::vector<TendonDelta> preds = predict(model, val_poses);
            row.mse = mse(preds, val_actual);
            row.mae = mae(preds, val_actual);
            const auto component = [](const TendonDelta& d, int k) {
                return k == 0 ? d.l1 : k == 1 ? d.l2 : d.l3;
            };
            for (int k = 0; k < 3; ++k) {
                double se = 0.0, ae = 0.0;
                for (std::size_t i = 0; i < preds.size(); ++i) {
                    const double e = component(preds[i], k) - component(val_actual[i], k);
                    se += e * e;
                    ae += std::abs(e);
                }
                row.mse_per_output[k] = se / static_cast<double>(preds.size());
                row.mae_per_output[k] = ae / static_cast<double>(preds.size());
            }
            report.models.emplace(row.model, std::move(model));
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw IoError("cannot open '" + path + "' for writing");
    std::fprintf(f, "model,mse,mae,fit_seconds,mse_l1,mse_l2,mse_l3,mae_l1,mae_l2,mae_l3\n");
    for (const EvalRow& r : report.rows) {
        if (r.failed) {
            std::fprintf(f, "%s,error,error,error,error,error,error,error,error,error\n",
                         r.model.c_str());
            continue;
        }
        std::fprintf(f, "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.model.c_str(),
                     r.mse, r.mae, r.fit_seconds, r.mse_per_output[0], r.mse_per_output[1],
                     r.mse_per_output[2], r.mae_per_output[0], r.mae_per_output[1],
                     r.mae_per_output[2]);
    }
    std::fclose(f);
}

std::vector<PoseAngles> alternating_sweep() {
    std::vector<PoseAngles> targets;
    for (int a = -90; a <= 90; a += 10) targets.push_back({static_cast<double>(a), 0.0});
    for (int b = -90; b <= 90; b += 10) targets.push_back({0.0, static_cast<double>(b)});
    return targets;
}

DeviationReport validate_controller(const Controller& controller, const PlantParams& params,
                                    const std::vector<PoseAngles>& targets) {
    PlantParams quiet = params;
    quiet.noise_sigma = 0.0;
    DeviationReport report;
    for (const PoseAngles& target : targets) {
        DeviationRow row;
        row.target = target;
        row.achieved = plant_forward(controller(target), quiet);
        row.dev_alpha = row.achieved.alpha - target.alpha;
        row.dev_beta = row.achieved.beta - target.beta;
        report.mean_abs_alpha += std::abs(row.dev_alpha);
        report.mean_abs_beta += std::abs(row.dev_beta);
        report.max_abs_alpha = std::max(report.max_abs_alpha, std::abs(row.dev_alpha));
        report.max_abs_beta = std::max(report.max_abs_beta, std::abs(row.dev_beta));
        report.rows.push_back(row);
    }
    if (!report.rows.empty()) {
        report.mean_abs_alpha /= static_cast<double>(report.rows.size());
        report.mean_abs_beta /= static_cast<double>(report.rows.size());
    }
    return report;
}

Controller controller_from_tf(const TransferFunction& tf) {
    return [tf](const PoseAngles& pose) { return tf.evaluate(pose); };
}

Controller analytical_controller() {
    return [](const PoseAngles& pose) { return analytical_inverse(pose); };
}

void write_deviation_csv(const DeviationReport& report, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw IoError("cannot open '" + path + "' for writing");
    std::fprintf(f, "target_alpha,target_beta,achieved_alpha,achieved_beta,dev_alpha,dev_beta\n");
    for (const DeviationRow& r : report.rows)
        std::fprintf(f, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.target.alpha, r.target.beta,
                     r.achieved.alpha, r.achieved.beta, r.dev_alpha, r.dev_beta);
    std::fclose(f);
}

void export_curves(const std::map<std::string, TrainingCurve>& curves,
                   const std::string& directory) {
    if (curves.empty()) throw EmptyInput("no training curves to export");
    std::filesystem::create_directories(directory);
    for (const auto& [name, curve] : curves) {
        const std::string csv_path = directory + "/curve_" + name + ".csv";
        std::FILE* f = std::fopen(csv_path.c_str(), "wb");
        if (f == nullptr) throw IoError("cannot open '" + csv_path + "' for writing");
        std::fprintf(f, "epoch,train_mae,val_mae\n");
        for (const TrainingCurvePoint& p : curve)
            std::fprintf(f, "%d,%.6f,%.6f\n", p.epoch, p.train_mae, p.val_mae);
        std::fclose(f);

        SvgChart chart;
        chart.title = name + ": MAE over epochs";
        SvgSeries train_series{"train", "#1f77b4", {}, {}};
        SvgSeries val_series{"validation", "#d62728", {}, {}};
        for (const TrainingCurvePoint& p : curve) {
            train_series.x.push_back(p.epoch);
            train_series.y.push_back(p.train_mae);
            val_series.x.push_back(p.epoch);
            val_series.y.push_back(p.val_mae);
        }
        chart.series = {train_series, val_series};
        write_text_file(directory + "/curve_" + name + ".svg", render_chart(chart));
    }
}

}  // namespace tendon
