// config.hpp — experiment configuration: strict JSON schema, no silent typos,
// mandatory explicit seed (wall-clock seeding is banned by contract).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bridgewalk/walk_model.hpp"

namespace bridgewalk {

struct ExperimentConfig {
    ModelSpec model;
    std::vector<int> n_grid;  // one or more path lengths
    int64_t trials = 1;
    std::string mode = "bridge";  // "bridge" | "unconditioned"
    uint64_t seed = 0;
    std::string out;
    int workers = 0;  // 0 = hardware concurrency
    std::optional<std::string> dump_paths;
    std::optional<int64_t> max_attempts;  // lamplighter rejection budget override
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

}  // namespace bridgewalk
