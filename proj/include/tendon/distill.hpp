#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tendon/model_api.hpp"

namespace tendon {

/// Monomial basis over (alpha, beta); degree-2 order is fixed as
/// [1, a, b, a^2, a*b, b^2].
struct PolyBasis {
    int degree = 2;  // 1 or 2

    int feature_count() const { return degree == 1 ? 3 : 6; }
    Vector features(const PoseAngles& pose) const;
};

/// Explicit polynomial transfer function: 3 outputs x feature_count
/// coefficients in raw angle units.
struct TransferFunction {
    Matrix coefficients;  // 3 x feature_count
    PolyBasis basis;
    std::string source;  // model family name or "analytical"
    double residual_rms = 0.0;
    bool surrogate_of_implicit_model = false;

    TendonDelta evaluate(const PoseAngles& pose) const;
};

/// Uniform probe grid used for distillation (default -90..90 step 5).
std::vector<PoseAngles> default_probe_grid();

/// Least-squares fit of the basis to the predictor's outputs on the grid.
TransferFunction distill_predictor(
    const std::function<std::vector<TendonDelta>(const std::vector<PoseAngles>&)>& predictor,
    const std::string& source, const PolyBasis& basis,
    const std::vector<PoseAngles>& grid);

TransferFunction distill_model(const TrainedModel& model, const PolyBasis& basis,
                               const std::vector<PoseAngles>& grid);
TransferFunction distill_analytical(const PolyBasis& basis,
                                    const std::vector<PoseAngles>& grid);

TendonDelta eval_tf(const TransferFunction& tf, const PoseAngles& pose);

/// One line per output, coefficients to 4 decimals:
///   L1 = <w0> + (<w1>) a + (<w2>) b [+ (<w3>) a^2 + (<w4>) a*b + (<w5>) b^2]
std::string render_equations(const TransferFunction& tf);

void write_transfer_function(const TransferFunction& tf, const std::string& json_path);
TransferFunction read_transfer_function(const std::string& json_path);

}  // namespace tendon
