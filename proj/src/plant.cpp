#include "tendon/plant.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace tendon {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void PlantParams::validate() const {
    if (segments < 1) throw ConfigError("segments must be >= 1");
    if (kappa_sat < 0.0 || kappa_sat > 0.5) throw ConfigError("kappa_sat outside [0, 0.5]");
    if (kappa_x < 0.0 || kappa_x > 0.5) throw ConfigError("kappa_x outside [0, 0.5]");
    if (g_sag < 0.0 || g_sag > 30.0) throw ConfigError("g_sag outside [0, 30]");
    if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
}

PlantParams plant_preset(const std::string& name) {
    if (name == "ideal") {
        PlantParams p;
        p.kappa_sat = 0.0;
        p.kappa_x = 0.0;
        p.g_sag = 0.0;
        return p;
    }
    if (name == "default") return PlantParams{};
    if (name == "heavy") {
        PlantParams p;
        p.kappa_sat = 0.15;
        p.g_sag = 6.0;
        return p;
    }
    throw ConfigError("unknown plant preset '" + name + "'");
}

TendonDelta analytical_inverse(const PoseAngles& pose) {
    if (!finite(pose.alpha) || !finite(pose.beta))
        throw NonFiniteInput("analytical_inverse: non-finite pose");
    TendonDelta d;
    d.l1 = pose.alpha / 1.5;
    d.l2 = pose.beta / 1.732 - pose.alpha / 3.0;
    d.l3 = -pose.beta / 1.732 - pose.alpha / 3.0;
    return d;
}

PoseAngles analytical_forward(const TendonDelta& cmd) {
    const double mean = (cmd.l1 + cmd.l2 + cmd.l3) / 3.0;
    const double l1 = cmd.l1 - mean;
    const double l2 = cmd.l2 - mean;
    PoseAngles p;
    p.alpha = 1.5 * l1;
    p.beta = 1.732 * (l2 + p.alpha / 3.0);
    return p;
}

PoseAngles plant_forward(const TendonDelta& cmd, const PlantParams& params, RngStream* rng) {
    params.validate();
    const PoseAngles ideal = analytical_forward(cmd);
    const double seg_scale = 4.0 / static_cast<double>(params.segments);
    const double ks = params.kappa_sat * seg_scale;
    const double gs = params.g_sag * seg_scale;

    PoseAngles achieved;
    achieved.alpha = ideal.alpha * (1.0 - ks * (ideal.alpha / 90.0) * (ideal.alpha / 90.0)) +
                     params.kappa_x * ideal.alpha * ideal.beta / 90.0;
    achieved.beta = ideal.beta * (1.0 - ks * (ideal.beta / 90.0) * (ideal.beta / 90.0)) -
                    gs * std::cos(ideal.beta * kDegToRad);
    if (rng != nullptr && params.noise_sigma > 0.0) {
        achieved.alpha += params.noise_sigma * rng->next_gaussian();
        achieved.beta += params.noise_sigma * rng->next_gaussian();
    }
    return achieved;
}

TendonDelta invert_plant(const PoseAngles& target, const PlantParams& params) {
    if (std::abs(target.alpha) > 90.0 || std::abs(target.beta) > 90.0)
        throw NonFiniteInput("invert_plant: target outside the +/-90 deg workspace");
    PlantParams quiet = params;
    quiet.noise_sigma = 0.0;

    auto residual = [&](const Eigen::Vector2d& ab) -> Eigen::Vector2d {
        const PoseAngles achieved =
            plant_forward(analytical_inverse({ab[0], ab[1]}), quiet);
        return {achieved.alpha - target.alpha, achieved.beta - target.beta};
    };

    constexpr double kFdStep = 1e-4;
    constexpr double kTol = 1e-6;
    constexpr int kMaxIter = 50;

    Eigen::Vector2d ab(target.alpha, target.beta);
    Eigen::Vector2d r = residual(ab);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        if (r.cwiseAbs().maxCoeff() < kTol) return analytical_inverse({ab[0], ab[1]});

        Eigen::Matrix2d jac;
        for (int j = 0; j < 2; ++j) {
            Eigen::Vector2d hi = ab, lo = ab;
            hi[j] += kFdStep;
            lo[j] -= kFdStep;
            jac.col(j) = (residual(hi) - residual(lo)) / (2.0 * kFdStep);
        }
        Eigen::Vector2d step = jac.fullPivLu().solve(-r);

        // Halve the step until the residual norm decreases (at most 8 times).
        double scale = 1.0;
        Eigen::Vector2d next_ab = ab + step;
        Eigen::Vector2d next_r = residual(next_ab);
        for (int h = 0; h < 8 && next_r.norm() >= r.norm(); ++h) {
            scale *= 0.5;
            next_ab = ab + scale * step;
            next_r = residual(next_ab);
        }
        ab = next_ab;
        r = next_r;
    }
    if (r.cwiseAbs().maxCoeff() < kTol) return analytical_inverse({ab[0], ab[1]});
    throw NoConvergence(r.cwiseAbs().maxCoeff());
}

}  // namespace tendon
