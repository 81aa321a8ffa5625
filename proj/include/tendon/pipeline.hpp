#pragma once

#include <string>

#include "tendon/config.hpp"
#include "tendon/evalkit.hpp"

namespace tendon {

struct GenerateResult {
    std::size_t sample_count = 0;
    int inversion_failures = 0;
};

/// Dataset CSV + meta sidecar into the run directory.
GenerateResult run_generate(const RunConfig& cfg);

struct BenchmarkResult {
    EvalReport report;
    bool any_failed = false;
};

/// Report CSV, per-model prediction SVGs and neural-network curve files.
/// Requires a generated dataset unless generate_if_missing is set.
BenchmarkResult run_benchmark_stage(const RunConfig& cfg, bool generate_if_missing = false);

/// Transfer-function JSON + rendered equations for the analytical baseline
/// and every configured model (models are refit deterministically from the
/// run's dataset and seed).
void run_distill_stage(const RunConfig& cfg);

struct ValidateResult {
    std::string best_model;
    DeviationReport analytical;
    DeviationReport distilled;
    // analytical mean abs deviation / distilled mean abs deviation; <=0 when
    // not applicable (analytical deviation already negligible).
    double improvement_alpha = 0.0;
    double improvement_beta = 0.0;
};

ValidateResult run_validate_stage(const RunConfig& cfg);

/// Collate the manifest into a single Markdown summary.
void run_report_stage(const RunConfig& cfg);

}  // namespace tendon
