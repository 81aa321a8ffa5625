#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "tendon/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitModel = 4;
constexpr int kExitMissingInput = 5;

struct CliOptions {
    std::string config_path;
    std::string seed;
    std::string out_dir;
    std::string models;
    std::string plant;
    std::string sweep_protocol;
    bool tune = false;
    bool generate_if_missing = false;
};

tendon::RunConfig resolve_config(const CliOptions& opts) {
    tendon::RunConfig cfg = opts.config_path.empty()
                                ? tendon::default_config()
                                : tendon::load_config_file(opts.config_path);
    if (!opts.seed.empty()) tendon::apply_config_entry(cfg, "seed", opts.seed);
    if (!opts.out_dir.empty()) tendon::apply_config_entry(cfg, "out", opts.out_dir);
    if (!opts.models.empty()) tendon::apply_config_entry(cfg, "models", opts.models);
    if (!opts.plant.empty()) tendon::apply_config_entry(cfg, "plant.preset", opts.plant);
    if (!opts.sweep_protocol.empty())
        tendon::apply_config_entry(cfg, "sweep.protocol", opts.sweep_protocol);
    if (opts.tune) cfg.tune = true;
    return cfg;
}

int run_command(const std::string& command, const CliOptions& opts) {
    const tendon::RunConfig cfg = resolve_config(opts);
    if (command == "generate") {
        const tendon::GenerateResult r = tendon::run_generate(cfg);
        std::printf("wrote %zu samples to %s/dataset.csv (%d inversion failures)\n",
                    r.sample_count, cfg.out_dir.c_str(), r.inversion_failures);
    } else if (command == "benchmark") {
        const tendon::BenchmarkResult r =
            tendon::run_benchmark_stage(cfg, opts.generate_if_missing);
        for (const tendon::EvalRow& row : r.report.rows) {
            if (row.failed)
                std::printf("%-18s failed: %s\n", row.model.c_str(), row.error.c_str());
            else
                std::printf("%-18s mse=%.6f mae=%.6f fit=%.4fs\n", row.model.c_str(), row.mse,
                            row.mae, row.fit_seconds);
        }
        std::printf("report written to %s/report.csv\n", cfg.out_dir.c_str());
        if (r.any_failed) return kExitModel;
    } else if (command == "distill") {
        tendon::run_distill_stage(cfg);
        std::printf("transfer functions written to %s/tf_*.json\n", cfg.out_dir.c_str());
    } else if (command == "validate") {
        const tendon::ValidateResult r = tendon::run_validate_stage(cfg);
        std::printf("best model: %s\n", r.best_model.c_str());
        std::printf("mean |alpha dev| analytical=%.4f distilled=%.4f\n",
                    r.analytical.mean_abs_alpha, r.distilled.mean_abs_alpha);
        std::printf("mean |beta dev|  analytical=%.4f distilled=%.4f\n",
                    r.analytical.mean_abs_beta, r.distilled.mean_abs_beta);
    } else if (command == "report") {
        tendon::run_report_stage(cfg);
        std::printf("summary written to %s/report.md\n", cfg.out_dir.c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale continuum-robot control toolkit"};
    app.require_subcommand(1);

    CliOptions opts;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "Path to a key = value config file");
        sub->add_option("--seed", opts.seed, "Master seed override");
        sub->add_option("--out", opts.out_dir, "Run directory override");
        sub->add_option("--models", opts.models, "Comma-separated model families");
        sub->add_option("--plant", opts.plant, "Plant preset: ideal, default or heavy");
        return sub;
    };

    add_common(app.add_subcommand("generate", "Synthesize the angle-to-tendon dataset"));
    CLI::App* benchmark =
        add_common(app.add_subcommand("benchmark", "Fit and score the model families"));
    benchmark->add_flag("--generate", opts.generate_if_missing,
                        "Generate the dataset first if it is missing");
    benchmark->add_flag("--tune", opts.tune, "Grid-tune ridge/lasso regularization");
    add_common(app.add_subcommand("distill", "Distill models into polynomial equations"));
    CLI::App* validate =
        add_common(app.add_subcommand("validate", "Closed-loop deviation sweep"));
    validate->add_option("--sweep-protocol", opts.sweep_protocol, "Target sweep protocol");
    add_common(app.add_subcommand("report", "Collate run artifacts into Markdown"));

    CLI11_PARSE(app, argc, argv);

    try {
        return run_command(app.get_subcommands().front()->get_name(), opts);
    } catch (const tendon::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const tendon::UnknownHyperparameter& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const tendon::MissingInput& e) {
        std::fprintf(stderr, "missing input: %s\n", e.what());
        return kExitMissingInput;
    } catch (const tendon::BadGridSpec& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const tendon::DatasetTooSparse& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const tendon::TooFewSamples& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const tendon::SchemaMismatch& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const tendon::IoError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "model error: %s\n", e.what());
        return kExitModel;
    }
}
