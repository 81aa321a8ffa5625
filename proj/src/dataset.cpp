#include "tendon/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tendon {

namespace {

std::string meta_path(const std::string& csv_path) {
    std::string stem = csv_path;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv")
        stem.resize(stem.size() - 4);
    return stem + ".meta.json";
}

constexpr const char* kHeader = "alpha_deg,beta_deg,l1,l2,l3,replicate,edge_flag";

}  // namespace

int GridSpec::axis_count() const {
    if (!(min_deg < max_deg) || !(step > 0.0)) throw BadGridSpec("need min < max and step > 0");
    const double span = (max_deg - min_deg) / step;
    const double rounded = std::round(span);
    if (std::abs(span - rounded) > 1e-9) throw BadGridSpec("range is not a multiple of step");
    return static_cast<int>(rounded) + 1;
}

std::vector<PoseAngles> generate_grid(double min_deg, double max_deg, double step) {
    GridSpec spec{min_deg, max_deg, step};
    const int n = spec.axis_count();
    std::vector<PoseAngles> poses;
    poses.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            poses.push_back({min_deg + i * step, min_deg + j * step});
    return poses;
}

Dataset build_dataset(const GridSpec& grid, int replicates, const PlantParams& params,
                      const std::string& preset_name, std::uint64_t seed) {
    if (replicates < 1) throw ConfigError("replicates must be >= 1");
    params.validate();
    PlantParams quiet = params;
    quiet.noise_sigma = 0.0;

    const int n = grid.axis_count();
    Dataset ds;
    ds.meta.preset = preset_name;
    ds.meta.params = params;
    ds.meta.grid = grid;
    ds.meta.grid_ordered = true;
    ds.meta.replicates = replicates;
    ds.meta.noise_sigma = params.noise_sigma;
    ds.meta.seed = seed;

    int failures = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const PoseAngles target{grid.min_deg + i * grid.step, grid.min_deg + j * grid.step};
            TendonDelta cmd;
            try {
                cmd = invert_plant(target, quiet);
            } catch (const NoConvergence&) {
                ++failures;
                ds.meta.dropped_points.push_back(i * n + j);
                continue;
            }
            const bool edge = std::abs(target.alpha) > 80.0 || std::abs(target.beta) > 80.0;
            const std::uint64_t point_index = static_cast<std::uint64_t>(i) * n + j;
            for (int r = 0; r < replicates; ++r) {
                Sample s;
                s.cmd = cmd;
                s.replicate = r;
                s.edge = edge;
                s.alpha_index = i;
                s.beta_index = j;
                if (params.noise_sigma > 0.0) {
                    RngStream rng(seed, RngStream::derive(seed, "dataset",
                                                          point_index * replicates + r));
                    s.pose = plant_forward(cmd, params, &rng);
                } else {
                    s.pose = target;
                }
                ds.samples.push_back(s);
            }
        }
    }
    ds.meta.inversion_failures = failures;
    const int total = n * n;
    if (total - failures < (total * 9 + 9) / 10)
        throw DatasetTooSparse("plant inversion failed on more than 10% of the grid");
    return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("train_fraction must lie in (0, 1)");
    const std::size_t n = ds.samples.size();
    const std::size_t n_train =
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n) throw TooFewSamples("split would leave a side empty");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    RngStream rng(seed, RngStream::derive(seed, "split", 0));
    for (std::size_t i = n; i > 1; --i) {  // Fisher-Yates
        const std::size_t j = static_cast<std::size_t>(rng.next_uniform() * i);
        std::swap(order[i - 1], order[j]);
    }

    Dataset train, val;
    train.meta = ds.meta;
    val.meta = ds.meta;
    for (std::size_t k = 0; k < n; ++k)
        (k < n_train ? train : val).samples.push_back(ds.samples[order[k]]);
    return {std::move(train), std::move(val)};
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw IoError("cannot open '" + path + "' for writing");
    std::fprintf(f, "%s\n", kHeader);
    for (const Sample& s : ds.samples) {
        std::fprintf(f, "%.6f,%.6f,%.6f,%.6f,%.6f,%d,%d\n", s.pose.alpha, s.pose.beta,
                     s.cmd.l1, s.cmd.l2, s.cmd.l3, s.replicate, s.edge ? 1 : 0);
    }
    std::fclose(f);

    nlohmann::json meta;
    meta["preset"] = ds.meta.preset;
    meta["segments"] = ds.meta.params.segments;
    meta["kappa_sat"] = ds.meta.params.kappa_sat;
    meta["kappa_x"] = ds.meta.params.kappa_x;
    meta["g_sag"] = ds.meta.params.g_sag;
    meta["grid_min"] = ds.meta.grid.min_deg;
    meta["grid_max"] = ds.meta.grid.max_deg;
    meta["grid_step"] = ds.meta.grid.step;
    meta["grid_ordered"] = ds.meta.grid_ordered;
    meta["replicates"] = ds.meta.replicates;
    meta["noise_sigma"] = ds.meta.noise_sigma;
    meta["seed"] = ds.meta.seed;
    meta["inversion_failures"] = ds.meta.inversion_failures;
    meta["dropped_points"] = ds.meta.dropped_points;
    std::ofstream mf(meta_path(path), std::ios::binary);
    if (!mf) throw IoError("cannot open '" + meta_path(path) + "' for writing");
    mf << meta.dump(2) << "\n";
}

Dataset read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::string header;
    if (!std::getline(f, header)) throw SchemaMismatch("empty file");
    if (!header.empty() && header.back() == '\r') header.pop_back();

    {
        std::vector<std::string> expected, got;
        std::stringstream se(kHeader), sg(header);
        std::string tok;
        while (std::getline(se, tok, ',')) expected.push_back(tok);
        while (std::getline(sg, tok, ',')) got.push_back(tok);
        for (const std::string& col : expected)
            if (std::find(got.begin(), got.end(), col) == got.end())
                throw SchemaMismatch("missing column '" + col + "'");
        if (got != expected) throw SchemaMismatch("unexpected column order or extras");
    }

    Dataset ds;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Sample s;
        int edge = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%d,%d", &s.pose.alpha, &s.pose.beta,
                        &s.cmd.l1, &s.cmd.l2, &s.cmd.l3, &s.replicate, &edge) != 7)
            throw SchemaMismatch("malformed row at line " + std::to_string(lineno));
        s.edge = edge != 0;
        ds.samples.push_back(s);
    }

    std::ifstream mf(meta_path(path), std::ios::binary);
    if (mf) {
        nlohmann::json meta = nlohmann::json::parse(mf);
        ds.meta.preset = meta.value("preset", std::string("default"));
        ds.meta.params.segments = meta.value("segments", 4);
        ds.meta.params.kappa_sat = meta.value("kappa_sat", 0.08);
        ds.meta.params.kappa_x = meta.value("kappa_x", 0.02);
        ds.meta.params.g_sag = meta.value("g_sag", 3.0);
        ds.meta.params.noise_sigma = meta.value("noise_sigma", 0.0);
        ds.meta.grid.min_deg = meta.value("grid_min", -90.0);
        ds.meta.grid.max_deg = meta.value("grid_max", 90.0);
        ds.meta.grid.step = meta.value("grid_step", 10.0);
        ds.meta.grid_ordered = meta.value("grid_ordered", false);
        ds.meta.replicates = meta.value("replicates", 1);
        ds.meta.noise_sigma = meta.value("noise_sigma", 0.0);
        ds.meta.seed = meta.value("seed", std::uint64_t{0});
        ds.meta.inversion_failures = meta.value("inversion_failures", 0);
        ds.meta.dropped_points = meta.value("dropped_points", std::vector<int>{});
    }

    // Recover grid coordinates for sequence models when the row order is the
    // generation order (grid-major, replicate inner).
    if (ds.meta.grid_ordered) {
        const int n = ds.meta.grid.axis_count();
        std::vector<int> kept;
        for (int p = 0; p < n * n; ++p)
            if (std::find(ds.meta.dropped_points.begin(), ds.meta.dropped_points.end(), p) ==
                ds.meta.dropped_points.end())
                kept.push_back(p);
        const std::size_t expected = kept.size() * static_cast<std::size_t>(ds.meta.replicates);
        if (ds.samples.size() == expected) {
            for (std::size_t k = 0; k < ds.samples.size(); ++k) {
                const int point = kept[k / ds.meta.replicates];
                ds.samples[k].alpha_index = point / n;
                ds.samples[k].beta_index = point % n;
            }
        } else {
            ds.meta.grid_ordered = false;
        }
    }
    return ds;
}

}  // namespace tendon
