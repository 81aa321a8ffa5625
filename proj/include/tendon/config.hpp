#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tendon/dataset.hpp"
#include "tendon/model_api.hpp"

namespace tendon {

/// Flat key = value run configuration with dotted keys. Unknown keys are
/// rejected before any stage runs.
struct RunConfig {
    std::uint64_t seed = 0;
    std::string out_dir = "run";
    std::string plant_preset = "default";
    PlantParams plant;  // preset plus overrides, noise_sigma excluded
    GridSpec grid;
    int replicates = 5;
    double noise_sigma = 0.5;
    double split_fraction = 0.8;
    std::vector<std::string> models;  // family names, default all eight
    std::map<std::string, std::map<std::string, double>> model_overrides;
    bool tune = false;
    int distill_degree = 2;
    std::string sweep_protocol = "alternating";

    /// Plant parameters with the dataset noise applied.
    PlantParams plant_with_noise() const;
    RegressorSpec spec_for(const std::string& family_name) const;

    /// Raw key/value view for the manifest snapshot.
    std::map<std::string, std::string> snapshot() const;
};

RunConfig default_config();
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);
/// Apply one dotted-key assignment (CLI override path).
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string file_digest(const std::string& path);

/// Per-run manifest: config snapshot plus every emitted file with its digest.
class Manifest {
  public:
    explicit Manifest(std::string run_dir);

    void set_config(const RunConfig& cfg);
    void record(const std::string& stage, const std::string& file_path);
    void save() const;

    const std::map<std::string, std::map<std::string, std::string>>& stages() const {
        return stages_;
    }
    static Manifest load(const std::string& run_dir);

  private:
    std::string run_dir_;
    std::map<std::string, std::string> config_;
    std::map<std::string, std::map<std::string, std::string>> stages_;  // stage -> file -> digest
};

}  // namespace tendon
