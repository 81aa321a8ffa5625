#include "tendon/distill.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "tendon/plant.hpp"

namespace tendon {

Vector PolyBasis::features(const PoseAngles& pose) const {
    if (degree != 1 && degree != 2) throw ConfigError("basis degree must be 1 or 2");
    Vector f(feature_count());
    f[0] = 1.0;
    f[1] = pose.alpha;
    f[2] = pose.beta;
    if (degree == 2) {
        f[3] = pose.alpha * pose.alpha;
        f[4] = pose.alpha * pose.beta;
        f[5] = pose.beta * pose.beta;
    }
    return f;
}

TendonDelta TransferFunction::evaluate(const PoseAngles& pose) const {
    const Vector f = basis.features(pose);
    const Vector out = coefficients * f;
    return {out[0], out[1], out[2]};
}

TendonDelta eval_tf(const TransferFunction& tf, const PoseAngles& pose) {
    return tf.evaluate(pose);
}

std::vector<PoseAngles> default_probe_grid() { return generate_grid(-90.0, 90.0, 5.0); }

TransferFunction distill_predictor(
    const std::function<std::vector<TendonDelta>(const std::vector<PoseAngles>&)>& predictor,
    const std::string& source, const PolyBasis& basis,
    const std::vector<PoseAngles>& grid) {
    if (grid.empty()) throw EmptyInput("distillation grid is empty");

    const auto n = static_cast<Eigen::Index>(grid.size());
    Matrix Phi(n, basis.feature_count());
    for (Eigen::Index i = 0; i < n; ++i)
        Phi.row(i) = basis.features(grid[static_cast<std::size_t>(i)]).transpose();

    const std::vector<TendonDelta> preds = predictor(grid);
    Matrix P(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const TendonDelta& d = preds[static_cast<std::size_t>(i)];
        P.row(i) << d.l1, d.l2, d.l3;
    }

    // Column equilibration: the raw monomials span five orders of magnitude
    // (1 vs alpha^2 = 8100), which the normal equations cannot absorb.
    Vector scale(Phi.cols());
    for (Eigen::Index c = 0; c < Phi.cols(); ++c) {
        scale[c] = std::sqrt(Phi.col(c).squaredNorm() / static_cast<double>(n));
        if (scale[c] < 1e-12) scale[c] = 1.0;
    }
    const Matrix Phi_scaled = Phi * scale.cwiseInverse().asDiagonal();

    TransferFunction tf;
    tf.basis = basis;
    tf.source = source;
    tf.coefficients =
        (scale.cwiseInverse().asDiagonal() * least_squares(Phi_scaled, P)).transpose();
    tf.residual_rms = std::sqrt((Phi * tf.coefficients.transpose() - P).squaredNorm() /
                                static_cast<double>(P.size()));
    return tf;
}

TransferFunction distill_model(const TrainedModel& model, const PolyBasis& basis,
                               const std::vector<PoseAngles>& grid) {
    TransferFunction tf = distill_predictor(
        [&](const std::vector<PoseAngles>& poses) { return predict(model, poses); },
        to_string(model.family), basis, grid);
    tf.surrogate_of_implicit_model =
        model.family == Family::bnn || model.family == Family::rnn;
    return tf;
}

TransferFunction distill_analytical(const PolyBasis& basis,
                                    const std::vector<PoseAngles>& grid) {
    return distill_predictor(
        [](const std::vector<PoseAngles>& poses) {
            std::vector<TendonDelta> out;
            out.reserve(poses.size());
            for (const PoseAngles& p : poses) out.push_back(analytical_inverse(p));
            return out;
        },
        "analytical", basis, grid);
}

std::string render_equations(const TransferFunction& tf) {
    static const char* kTerms[] = {"", " a", " b", " a^2", " a*b", " b^2"};
    std::string out;
    char buf[64];
    for (int row = 0; row < 3; ++row) {
        std::snprintf(buf, sizeof buf, "L%d = %.4f", row + 1, tf.coefficients(row, 0));
        out += buf;
        for (int j = 1; j < tf.basis.feature_count(); ++j) {
            std::snprintf(buf, sizeof buf, " + (%.4f)%s", tf.coefficients(row, j),
                          kTerms[j]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void write_transfer_function(const TransferFunction& tf, const std::string& json_path) {
    nlohmann::json j;
    j["source"] = tf.source;
    j["degree"] = tf.basis.degree;
    j["residual_rms"] = tf.residual_rms;
    if (tf.surrogate_of_implicit_model) j["surrogate_of_implicit_model"] = true;
    static const char* kNames[] = {"L1", "L2", "L3"};
    for (int row = 0; row < 3; ++row) {
        nlohmann::json output;
        output["name"] = kNames[row];
        std::vector<double> coeffs;
        for (int c = 0; c < tf.basis.feature_count(); ++c)
            coeffs.push_back(tf.coefficients(row, c));
        output["coefficients"] = coeffs;
        j["outputs"].push_back(output);
    }
    std::ofstream f(json_path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + json_path + "' for writing");
    f << j.dump(2) << "\n";
}

TransferFunction read_transfer_function(const std::string& json_path) {
    std::ifstream f(json_path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + json_path + "'");
    nlohmann::json j = nlohmann::json::parse(f);
    TransferFunction tf;
    tf.source = j.at("source").get<std::string>();
    tf.basis.degree = j.at("degree").get<int>();
    tf.residual_rms = j.value("residual_rms", 0.0);
    tf.surrogate_of_implicit_model = j.value("surrogate_of_implicit_model", false);
    tf.coefficients = Matrix::Zero(3, tf.basis.feature_count());
    const auto& outputs = j.at("outputs");
    if (outputs.size() != 3) throw SchemaMismatch("expected 3 outputs");
    for (int row = 0; row < 3; ++row) {
        const auto coeffs = outputs[row].at("coefficients").get<std::vector<double>>();
        if (static_cast<int>(coeffs.size()) != tf.basis.feature_count())
            throw SchemaMismatch("coefficient count does not match degree");
        for (int c = 0; c < tf.basis.feature_count(); ++c)
            tf.coefficients(row, c) = coeffs[static_cast<std::size_t>(c)];
    }
    return tf;
}

}  // namespace tendon
