#pragma once

#include <stdexcept>
#include <string>

namespace tendon {

struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Newton inversion failed; carries the final residual for diagnostics.
struct NoConvergence : std::runtime_error {
    double residual;
    explicit NoConvergence(double r)
        : std::runtime_error("plant inversion did not converge, residual " + std::to_string(r)),
          residual(r) {}
};

struct BadGridSpec : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetTooSparse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooFewSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownHyperparameter : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingOrderingMetadata : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tendon
