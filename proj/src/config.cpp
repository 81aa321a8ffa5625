#include "tendon/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tendon {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' needs a numeric value, got '" + value +
                          "'");
    }
}

std::string format_number(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

PlantParams RunConfig::plant_with_noise() const {
    PlantParams p = plant;
    p.noise_sigma = noise_sigma;
    return p;
}

RegressorSpec RunConfig::spec_for(const std::string& family_name) const {
    const Family family = family_from_string(family_name);
    std::map<std::string, double> overrides;
    const auto it = model_overrides.find(to_string(family));
    if (it != model_overrides.end()) overrides = it->second;
    if (tune && (family == Family::ridge || family == Family::lasso) &&
        overrides.find("tune") == overrides.end())
        overrides["tune"] = 1.0;
    return RegressorSpec(family, RngStream::derive(seed, "model_" + to_string(family), 0),
                         overrides);
}

std::map<std::string, std::string> RunConfig::snapshot() const {
    std::map<std::string, std::string> kv;
    kv["seed"] = std::to_string(seed);
    kv["out"] = out_dir;
    kv["plant.preset"] = plant_preset;
    kv["plant.segments"] = std::to_string(plant.segments);
    kv["plant.kappa_sat"] = format_number(plant.kappa_sat);
    kv["plant.kappa_x"] = format_number(plant.kappa_x);
    kv["plant.g_sag"] = format_number(plant.g_sag);
    kv["grid.min"] = format_number(grid.min_deg);
    kv["grid.max"] = format_number(grid.max_deg);
    kv["grid.step"] = format_number(grid.step);
    kv["dataset.replicates"] = std::to_string(replicates);
    kv["dataset.noise_sigma"] = format_number(noise_sigma);
    kv["split.fraction"] = format_number(split_fraction);
    kv["tune"] = tune ? "1" : "0";
    kv["distill.degree"] = std::to_string(distill_degree);
    kv["sweep.protocol"] = sweep_protocol;
    std::string joined;
    for (const std::string& m : models) joined += (joined.empty() ? "" : ",") + m;
    kv["models"] = joined;
    for (const auto& [family, overrides] : model_overrides)
        for (const auto& [key, value] : overrides)
            kv["model." + family + "." + key] = format_number(value);
    return kv;
}

RunConfig default_config() {
    RunConfig cfg;
    for (Family f : all_families()) cfg.models.push_back(to_string(f));
    return cfg;
}

void apply_config_entry(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
    const std::string key = trim(raw_key);
    if (key == "seed") {
        try {
            cfg.seed = std::stoull(value);
        } catch (const std::exception&) {
            throw ConfigError("config key 'seed' needs an unsigned integer, got '" + value +
                              "'");
        }
    } else if (key == "out") {
        cfg.out_dir = value;
    } else if (key == "plant.preset") {
        cfg.plant_preset = value;
        const double noise = cfg.noise_sigma;
        cfg.plant = plant_preset(value);  // throws on unknown preset
        cfg.noise_sigma = noise;
    } else if (key == "plant.segments") {
        cfg.plant.segments = static_cast<int>(parse_number(key, value));
    } else if (key == "plant.kappa_sat") {
        cfg.plant.kappa_sat = parse_number(key, value);
    } else if (key == "plant.kappa_x") {
        cfg.plant.kappa_x = parse_number(key, value);
    } else if (key == "plant.g_sag") {
        cfg.plant.g_sag = parse_number(key, value);
    } else if (key == "grid.min") {
        cfg.grid.min_deg = parse_number(key, value);
    } else if (key == "grid.max") {
        cfg.grid.max_deg = parse_number(key, value);
    } else if (key == "grid.step") {
        cfg.grid.step = parse_number(key, value);
    } else if (key == "dataset.replicates") {
        cfg.replicates = static_cast<int>(parse_number(key, value));
    } else if (key == "dataset.noise_sigma") {
        cfg.noise_sigma = parse_number(key, value);
    } else if (key == "split.fraction") {
        cfg.split_fraction = parse_number(key, value);
    } else if (key == "tune") {
        cfg.tune = parse_number(key, value) != 0.0;
    } else if (key == "distill.degree") {
        cfg.distill_degree = static_cast<int>(parse_number(key, value));
        if (cfg.distill_degree != 1 && cfg.distill_degree != 2)
            throw ConfigError("distill.degree must be 1 or 2");
    } else if (key == "sweep.protocol") {
        if (value != "alternating")
            throw ConfigError("unknown sweep protocol '" + value + "'");
        cfg.sweep_protocol = value;
    } else if (key == "models") {
        cfg.models.clear();
        std::stringstream ss(value);
        std::string name;
        while (std::getline(ss, name, ',')) {
            name = trim(name);
            if (name.empty()) continue;
            cfg.models.push_back(to_string(family_from_string(name)));
        }
        if (cfg.models.empty()) throw ConfigError("'models' must name at least one family");
    } else if (key.rfind("model.", 0) == 0) {
        const std::string rest = key.substr(6);
        const auto dot = rest.find('.');
        if (dot == std::string::npos)
            throw ConfigError("model override key must look like model.<family>.<key>");
        const Family family = family_from_string(rest.substr(0, dot));
        const std::string hyper_key = rest.substr(dot + 1);
        if (RegressorSpec::defaults(family).find(hyper_key) ==
            RegressorSpec::defaults(family).end())
            throw ConfigError("unknown hyperparameter '" + hyper_key + "' for " +
                              to_string(family));
        cfg.model_overrides[to_string(family)][hyper_key] = parse_number(key, value);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg = default_config();
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + " is not 'key = value'");
        apply_config_entry(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

std::string file_digest(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for digest");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (f.read(buf, sizeof buf) || f.gcount() > 0) {
        for (std::streamsize i = 0; i < f.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!f) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

Manifest::Manifest(std::string run_dir) : run_dir_(std::move(run_dir)) {}

void Manifest::set_config(const RunConfig& cfg) { config_ = cfg.snapshot(); }

void Manifest::record(const std::string& stage, const std::string& file_path) {
    std::string rel = file_path;
    const std::string prefix = run_dir_ + "/";
    if (rel.rfind(prefix, 0) == 0) rel = rel.substr(prefix.size());
    stages_[stage][rel] = file_digest(file_path);
}

void Manifest::save() const {
    nlohmann::json j;
    j["toolkit_version"] = "1.0.0";
    j["config"] = config_;
    for (const auto& [stage, files] : stages_) j["stages"][stage] = files;
    std::filesystem::create_directories(run_dir_);
    std::ofstream f(run_dir_ + "/manifest.json", std::ios::binary);
    if (!f) throw IoError("cannot write manifest in '" + run_dir_ + "'");
    f << j.dump(2) << "\n";
}

Manifest Manifest::load(const std::string& run_dir) {
    std::ifstream f(run_dir + "/manifest.json", std::ios::binary);
    if (!f) throw MissingInput("no manifest.json in '" + run_dir + "'");
    nlohmann::json j = nlohmann::json::parse(f);
    Manifest m(run_dir);
    if (j.contains("config"))
        m.config_ = j["config"].get<std::map<std::string, std::string>>();
    if (j.contains("stages"))
        m.stages_ =
            j["stages"].get<std::map<std::string, std::map<std::string, std::string>>>();
    return m;
}

}  // namespace tendon
