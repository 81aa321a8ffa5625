#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tendon/plant.hpp"

namespace tendon {

/// Grid geometry of a sweep, kept so datasets can be regenerated
/// bit-identically and so sequence-based models can recover the ordering.
struct GridSpec {
    double min_deg = -90.0;
    double max_deg = 90.0;
    double step = 10.0;

    int axis_count() const;
};

struct Sample {
    PoseAngles pose;  // achieved (possibly noisy) angles, the model input
    TendonDelta cmd;  // tendon command, the model output
    int replicate = 0;
    bool edge = false;  // |alpha| or |beta| of the target beyond 80 deg
    // Grid coordinates of the originating target; not persisted to CSV but
    // reconstructable from the sidecar metadata. -1 when unknown.
    int alpha_index = -1;
    int beta_index = -1;
};

struct DatasetMeta {
    std::string preset = "default";
    PlantParams params;
    GridSpec grid;
    bool grid_ordered = false;  // true when built from a full sweep
    int replicates = 1;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    int inversion_failures = 0;
    std::vector<int> dropped_points;  // flat grid indices that failed to invert
};

struct Dataset {
    std::vector<Sample> samples;
    DatasetMeta meta;

    std::size_t size() const { return samples.size(); }
};

/// Cartesian product of the axis values, row-major (alpha outer, beta inner).
std::vector<PoseAngles> generate_grid(double min_deg, double max_deg, double step);

/// Invert the noise-free plant at every grid target, then record the achieved
/// pose (noisy when noise_sigma > 0) for each replicate. Targets where the
/// inversion fails are dropped and counted; throws DatasetTooSparse when
/// fewer than 90% of the grid succeeds.
Dataset build_dataset(const GridSpec& grid, int replicates, const PlantParams& params,
                      const std::string& preset_name, std::uint64_t seed);

/// Seeded uniform shuffle followed by a prefix split into (train, validation).
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed);

/// CSV with header alpha_deg,beta_deg,l1,l2,l3,replicate,edge_flag (6-decimal
/// fixed floats, LF line endings) plus a <stem>.meta.json sidecar.
void write_csv(const Dataset& ds, const std::string& path);
Dataset read_csv(const std::string& path);

}  // namespace tendon
