#include "tendon/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "tendon/svg.hpp"

namespace tendon {

namespace {

namespace fs = std::filesystem;

std::string dataset_path(const RunConfig& cfg) { return cfg.out_dir + "/dataset.csv"; }
std::string report_path(const RunConfig& cfg) { return cfg.out_dir + "/report.csv"; }

Manifest open_manifest(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    Manifest m = fs::exists(cfg.out_dir + "/manifest.json") ? Manifest::load(cfg.out_dir)
                                                            : Manifest(cfg.out_dir);
    m.set_config(cfg);
    return m;
}

Dataset load_dataset(const RunConfig& cfg) {
    if (!fs::exists(dataset_path(cfg)))
        throw MissingInput("no dataset in '" + cfg.out_dir + "'; run generate first");
    return read_csv(dataset_path(cfg));
}

SvgChart prediction_chart(const std::string& title, const std::vector<double>& actual,
                          const std::vector<double>& predicted) {
    SvgChart chart;
    chart.title = title;
    SvgSeries act{"actual", "#1f77b4", {}, {}};
    SvgSeries pred{"predicted", "#d62728", {}, {}};
    SvgSeries err{"abs error", "#7f7f7f", {}, {}};
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double x = static_cast<double>(i);
        act.x.push_back(x);
        act.y.push_back(actual[i]);
        pred.x.push_back(x);
        pred.y.push_back(predicted[i]);
        err.x.push_back(x);
        err.y.push_back(std::abs(actual[i] - predicted[i]));
    }
    chart.series = {act, pred, err};
    return chart;
}

}  // namespace

GenerateResult run_generate(const RunConfig& cfg) {
    Manifest manifest = open_manifest(cfg);
    const Dataset ds = build_dataset(cfg.grid, cfg.replicates, cfg.plant_with_noise(),
                                     cfg.plant_preset, cfg.seed);
    write_csv(ds, dataset_path(cfg));
    manifest.record("generate", dataset_path(cfg));
    manifest.record("generate", cfg.out_dir + "/dataset.meta.json");
    manifest.save();
    return {ds.samples.size(), ds.meta.inversion_failures};
}

BenchmarkResult run_benchmark_stage(const RunConfig& cfg, bool generate_if_missing) {
    if (!fs::exists(dataset_path(cfg))) {
        if (!generate_if_missing)
            throw MissingInput("no dataset in '" + cfg.out_dir + "'; run generate first");
        run_generate(cfg);
    }
    Manifest manifest = open_manifest(cfg);
    const Dataset ds = load_dataset(cfg);
    const auto [train, val] = split(ds, cfg.split_fraction, cfg.seed);

    std::vector<RegressorSpec> specs;
    for (const std::string& name : cfg.models) specs.push_back(cfg.spec_for(name));

    BenchmarkResult result;
    result.report = run_benchmark(specs, train, val);
    write_report_csv(result.report, report_path(cfg));
    manifest.record("benchmark", report_path(cfg));

    std::vector<PoseAngles> val_poses;
    std::vector<TendonDelta> val_actual;
    for (const Sample& s : val.samples) {
        val_poses.push_back(s.pose);
        val_actual.push_back(s.cmd);
    }

    std::map<std::string, TrainingCurve> curves;
    for (const EvalRow& row : result.report.rows) {
        if (row.failed) {
            result.any_failed = true;
            continue;
        }
        const TrainedModel& model = result.report.models.at(row.model);
        const std::vector<TendonDelta> preds = predict(model, val_poses);
        std::vector<SvgChart> charts;
        static const char* kNames[] = {"L1", "L2", "L3"};
        for (int k = 0; k < 3; ++k) {
            std::vector<double> actual, predicted;
            for (std::size_t i = 0; i < preds.size(); ++i) {
                const auto get = [&](const TendonDelta& d) {
                    return k == 0 ? d.l1 : k == 1 ? d.l2 : d.l3;
                };
                actual.push_back(get(val_actual[i]));
                predicted.push_back(get(preds[i]));
            }
            charts.push_back(prediction_chart(row.model + " " + kNames[k], actual, predicted));
        }
        const std::string svg_path = cfg.out_dir + "/pred_vs_actual_" + row.model + ".svg";
        write_text_file(svg_path, render_charts(charts));
        manifest.record("benchmark", svg_path);

        if (model.curve) curves[row.model] = *model.curve;
    }
    if (!curves.empty()) {
        export_curves(curves, cfg.out_dir);
        for (const auto& [name, curve] : curves) {
            manifest.record("benchmark", cfg.out_dir + "/curve_" + name + ".csv");
            manifest.record("benchmark", cfg.out_dir + "/curve_" + name + ".svg");
        }
    }
    manifest.save();
    return result;
}

void run_distill_stage(const RunConfig& cfg) {
    Manifest manifest = open_manifest(cfg);
    const Dataset ds = load_dataset(cfg);
    const auto [train, val] = split(ds, cfg.split_fraction, cfg.seed);

    const PolyBasis basis{cfg.distill_degree};
    const std::vector<PoseAngles> grid = default_probe_grid();

    auto emit = [&](const TransferFunction& tf, const std::string& name) {
        const std::string json_path = cfg.out_dir + "/tf_" + name + ".json";
        write_transfer_function(tf, json_path);
        write_text_file(cfg.out_dir + "/tf_" + name + ".txt", render_equations(tf));
        manifest.record("distill", json_path);
        manifest.record("distill", cfg.out_dir + "/tf_" + name + ".txt");
    };

    emit(distill_analytical(basis, grid), "analytical");
    for (const std::string& name : cfg.models) {
        const TrainedModel model = fit(cfg.spec_for(name), train, val);
        emit(distill_model(model, basis, grid), name);
    }
    manifest.save();
}

ValidateResult run_validate_stage(const RunConfig& cfg) {
    if (!fs::exists(report_path(cfg)))
        throw MissingInput("no report in '" + cfg.out_dir + "'; run benchmark first");
    Manifest manifest = open_manifest(cfg);

    // Best model = lowest validation MAE, ties broken by lower fit time.
    std::ifstream rf(report_path(cfg), std::ios::binary);
    std::string line;
    std::getline(rf, line);  // header
    std::string best;
    double best_mae = std::numeric_limits<double>::infinity();
    double best_time = std::numeric_limits<double>::infinity();
    while (std::getline(rf, line)) {
        std::stringstream ss(line);
        std::string model, mse_s, mae_s, time_s;
        std::getline(ss, model, ',');
        std::getline(ss, mse_s, ',');
        std::getline(ss, mae_s, ',');
        std::getline(ss, time_s, ',');
        if (mae_s == "error" || mae_s.empty()) continue;
        const double m = std::stod(mae_s);
        const double t = std::stod(time_s);
        if (m < best_mae || (m == best_mae && t < best_time)) {
            best_mae = m;
            best_time = t;
            best = model;
        }
    }
    if (best.empty()) throw MissingInput("report has no successful model rows");

    const std::string tf_path = cfg.out_dir + "/tf_" + best + ".json";
    if (!fs::exists(tf_path) || !fs::exists(cfg.out_dir + "/tf_analytical.json"))
        throw MissingInput("transfer functions missing; run distill first");

    const TransferFunction best_tf = read_transfer_function(tf_path);
    const std::vector<PoseAngles> targets = alternating_sweep();

    ValidateResult result;
    result.best_model = best;
    result.analytical = validate_controller(analytical_controller(), cfg.plant, targets);
    result.distilled = validate_controller(controller_from_tf(best_tf), cfg.plant, targets);

    write_deviation_csv(result.analytical, cfg.out_dir + "/deviations_analytical.csv");
    write_deviation_csv(result.distilled, cfg.out_dir + "/deviations_" + best + ".csv");
    manifest.record("validate", cfg.out_dir + "/deviations_analytical.csv");
    manifest.record("validate", cfg.out_dir + "/deviations_" + best + ".csv");

    static const char* kAxes[] = {"alpha", "beta"};
    for (int axis = 0; axis < 2; ++axis) {
        SvgChart chart;
        chart.title = std::string(kAxes[axis]) + " deviation: analytical vs " + best;
        SvgSeries a{"analytical", "#e377c2", {}, {}};
        SvgSeries d{best, "#1f77b4", {}, {}};
        for (std::size_t i = 0; i < targets.size(); ++i) {
            a.x.push_back(static_cast<double>(i));
            d.x.push_back(static_cast<double>(i));
            a.y.push_back(axis == 0 ? result.analytical.rows[i].dev_alpha
                                    : result.analytical.rows[i].dev_beta);
            d.y.push_back(axis == 0 ? result.distilled.rows[i].dev_alpha
                                    : result.distilled.rows[i].dev_beta);
        }
        chart.series = {a, d};
        const std::string path =
            cfg.out_dir + "/deviation_overlay_" + kAxes[axis] + ".svg";
        write_text_file(path, render_chart(chart));
        manifest.record("validate", path);
    }

    constexpr double kNegligible = 1e-9;
    auto ratio = [](double analytical, double distilled) {
        return analytical < kNegligible ? -1.0 : analytical / std::max(distilled, 1e-300);
    };
    result.improvement_alpha =
        ratio(result.analytical.mean_abs_alpha, result.distilled.mean_abs_alpha);
    result.improvement_beta =
        ratio(result.analytical.mean_abs_beta, result.distilled.mean_abs_beta);

    std::ostringstream summary;
    summary << "controller validation on plant preset '" << cfg.plant_preset << "'\n";
    summary << "best model: " << best << "\n";
    summary << "mean |alpha deviation| analytical=" << result.analytical.mean_abs_alpha
            << " distilled=" << result.distilled.mean_abs_alpha << "\n";
    summary << "mean |beta deviation|  analytical=" << result.analytical.mean_abs_beta
            << " distilled=" << result.distilled.mean_abs_beta << "\n";
    for (int axis = 0; axis < 2; ++axis) {
        const double r = axis == 0 ? result.improvement_alpha : result.improvement_beta;
        summary << "improvement ratio (" << kAxes[axis] << "): ";
        if (r < 0.0)
            summary << "not applicable (analytical deviation already negligible)\n";
        else
            summary << r << "x\n";
    }
    write_text_file(cfg.out_dir + "/validation_summary.txt", summary.str());
    manifest.record("validate", cfg.out_dir + "/validation_summary.txt");
    manifest.save();
    return result;
}

void run_report_stage(const RunConfig& cfg) {
    Manifest manifest = Manifest::load(cfg.out_dir);
    std::ostringstream md;
    md << "# Run summary\n\n";
    md << "Run directory: `" << cfg.out_dir << "`\n\n";
    for (const auto& [stage, files] : manifest.stages()) {
        md << "## " << stage << "\n\n";
        md << "| file | digest |\n|---|---|\n";
        for (const auto& [file, digest] : files)
            md << "| " << file << " | `" << digest << "` |\n";
        md << "\n";
    }
    if (fs::exists(cfg.out_dir + "/validation_summary.txt")) {
        std::ifstream f(cfg.out_dir + "/validation_summary.txt", std::ios::binary);
        md << "## Validation\n\n```\n" << f.rdbuf() << "```\n";
    }
    write_text_file(cfg.out_dir + "/report.md", md.str());
    manifest.set_config(cfg);
    manifest.record("report", cfg.out_dir + "/report.md");
    manifest.save();
}

}  // namespace tendon
