#pragma once

#include <optional>
#include <string>

#include "tendon/errors.hpp"
#include "tendon/rng.hpp"

namespace tendon {

/// Tip orientation in degrees.
struct PoseAngles {
    double alpha = 0.0;  // yaw
    double beta = 0.0;   // pitch
};

/// Tendon length variations. Commands produced by analytical_inverse
/// satisfy l1 + l2 + l3 = 0 by construction.
struct TendonDelta {
    double l1 = 0.0;
    double l2 = 0.0;
    double l3 = 0.0;
};

/// Synthetic plant parameters: the analytical decoupled kinematics plus a
/// smooth perturbation (cubic saturation, yaw/pitch cross-coupling and a
/// gravity droop on pitch). kappa_sat and g_sag scale with 4/segments so
/// fewer segments track worse.
struct PlantParams {
    int segments = 4;
    double kappa_sat = 0.08;
    double kappa_x = 0.02;
    double g_sag = 3.0;     // degrees
    double noise_sigma = 0.0;  // degrees, measurement noise on achieved angles

    void validate() const;
};

/// Named presets exposed on the CLI: "ideal", "default", "heavy".
PlantParams plant_preset(const std::string& name);

/// L1 = alpha/1.5, L2 = beta/1.732 - alpha/3, L3 = -beta/1.732 - alpha/3.
TendonDelta analytical_inverse(const PoseAngles& pose);

/// Exact inverse of analytical_inverse; non-sum-zero commands are first
/// projected onto the sum-zero subspace by subtracting the component mean.
PoseAngles analytical_forward(const TendonDelta& cmd);

/// Achieved angles under the perturbed plant. Adds Gaussian measurement
/// noise when an RNG is supplied and noise_sigma > 0.
PoseAngles plant_forward(const TendonDelta& cmd, const PlantParams& params,
                         RngStream* rng = nullptr);

/// Numerically invert the noise-free perturbed plant with a damped 2D
/// Newton iteration (central finite-difference Jacobian, step 1e-4 deg,
/// residual tolerance 1e-6 deg, at most 50 iterations).
/// Throws NoConvergence with the final residual on failure.
TendonDelta invert_plant(const PoseAngles& target, const PlantParams& params);

}  // namespace tendon
