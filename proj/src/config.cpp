// config.cpp — strict experiment-config parsing and round-trip serialization.
#include "bridgewalk/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bridgewalk {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            fail(errc::config, "unknown key '" + it.key() + "' in " + where);
}

ModelSpec model_from_json(const json& j) {
    if (!j.is_object()) fail(errc::config, "'model' must be an object");
    reject_unknown_keys(j, {"kind", "b", "dim", "jumps"}, "model");
    ModelSpec spec;
    if (!j.contains("kind") || !j["kind"].is_string()) fail(errc::config, "model.kind is required");
    spec.kind = j["kind"].get<std::string>();
    if (j.contains("b")) spec.b = j["b"].get<int>();
    if (j.contains("dim")) spec.dim = j["dim"].get<int>();
    if (j.contains("jumps")) {
        if (!j["jumps"].is_array()) fail(errc::config, "model.jumps must be an array of integers");
        for (const auto& v : j["jumps"]) spec.jumps.push_back(v.get<int>());
    }
    if (spec.kind != "tree" && spec.kind != "lattice" && spec.kind != "lamplighter")
        fail(errc::config, "model.kind must be tree, lattice, or lamplighter");
    if (spec.kind == "tree" && spec.b < 2) fail(errc::config, "model.b must be >= 2 for trees");
    return spec;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(errc::config, std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) fail(errc::config, "config root must be an object");
    reject_unknown_keys(
        j, {"model", "n", "n_grid", "trials", "mode", "seed", "out", "workers", "dump_paths", "max_attempts"},
        "config");

    ExperimentConfig cfg;
    if (!j.contains("model")) fail(errc::config, "config requires 'model'");
    cfg.model = model_from_json(j["model"]);

    if (j.contains("n") == j.contains("n_grid"))
        fail(errc::config, "config requires exactly one of 'n' or 'n_grid'");
    if (j.contains("n")) cfg.n_grid = {j["n"].get<int>()};
    if (j.contains("n_grid")) {
        if (!j["n_grid"].is_array() || j["n_grid"].empty())
            fail(errc::config, "'n_grid' must be a nonempty array");
        for (const auto& v : j["n_grid"]) cfg.n_grid.push_back(v.get<int>());
    }
    for (int n : cfg.n_grid)
        if (n < 1) fail(errc::config, "'n' values must be >= 1");

    if (j.contains("trials")) cfg.trials = j["trials"].get<int64_t>();
    if (cfg.trials < 1) fail(errc::config, "'trials' must be >= 1");

    if (j.contains("mode")) cfg.mode = j["mode"].get<std::string>();
    if (cfg.mode != "bridge" && cfg.mode != "unconditioned")
        fail(errc::config, "'mode' must be bridge or unconditioned");

    if (!j.contains("seed")) fail(errc::config, "config requires an explicit 'seed'");
    cfg.seed = j["seed"].get<uint64_t>();

    if (!j.contains("out") || !j["out"].is_string()) fail(errc::config, "config requires 'out'");
    cfg.out = j["out"].get<std::string>();

    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
    if (cfg.workers < 0) fail(errc::config, "'workers' must be >= 0");
    if (j.contains("dump_paths")) cfg.dump_paths = j["dump_paths"].get<std::string>();
    if (j.contains("max_attempts")) {
        cfg.max_attempts = j["max_attempts"].get<int64_t>();
        if (*cfg.max_attempts < 1) fail(errc::config, "'max_attempts' must be >= 1");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::config, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    json j;
    json m;
    m["kind"] = cfg.model.kind;
    if (cfg.model.b) m["b"] = cfg.model.b;
    if (cfg.model.dim) m["dim"] = cfg.model.dim;
    if (!cfg.model.jumps.empty()) m["jumps"] = cfg.model.jumps;
    j["model"] = m;
    j["n_grid"] = cfg.n_grid;
    j["trials"] = cfg.trials;
    j["mode"] = cfg.mode;
    j["seed"] = cfg.seed;
    j["out"] = cfg.out;
    j["workers"] = cfg.workers;
    if (cfg.dump_paths) j["dump_paths"] = *cfg.dump_paths;
    if (cfg.max_attempts) j["max_attempts"] = *cfg.max_attempts;
    return j.dump(2) + "\n";
}

}  // namespace bridgewalk
