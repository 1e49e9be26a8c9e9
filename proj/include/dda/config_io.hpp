#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "dda/simulator.hpp"
#include "dda/version.hpp"

namespace dda {

// Flat JSON keys mirroring SimConfig. Unknown keys are rejected so typos
// fail loudly; every key is optional and falls back to the field default.
inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "problem",      "dim",          "data_points",  "nodes",       "problem_seed",
        "instance_file", "topology",    "degree",       "topology_seed", "schedule",
        "step_scale",   "step_exponent", "r",           "max_iters",   "target_gap",
        "target_value", "time_budget",  "stop_on_target", "record_every", "workers"};
    return keys;
}

inline SimConfig config_from_json(const nlohmann::json& j) {
    std::vector<std::string> errs;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& keys = config_keys();
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
            errs.push_back("unknown config key '" + it.key() + "'");
    }

    SimConfig cfg;
    auto read = [&](const char* key, auto& field) {
        if (!j.contains(key)) return;
        try {
            field = j.at(key).get<std::decay_t<decltype(field)>>();
        } catch (const std::exception&) {
            errs.push_back(std::string("key '") + key + "' has the wrong type");
        }
    };
    auto read_opt = [&](const char* key, auto& field) {
        if (!j.contains(key) || j.at(key).is_null()) return;
        typename std::decay_t<decltype(field)>::value_type v{};
        try {
            v = j.at(key).get<typename std::decay_t<decltype(field)>::value_type>();
            field = v;
        } catch (const std::exception&) {
            errs.push_back(std::string("key '") + key + "' has the wrong type");
        }
    };

    read("problem", cfg.problem.kind);
    read("dim", cfg.problem.dim);
    read("data_points", cfg.problem.data_points);
    read("nodes", cfg.problem.nodes);
    read("problem_seed", cfg.problem.seed);
    read("instance_file", cfg.problem.instance_file);
    read("topology", cfg.topology.kind);
    read("degree", cfg.topology.degree);
    read("topology_seed", cfg.topology.seed);
    if (j.contains("schedule")) {
        const std::string text = j.at("schedule").is_string() ? j.at("schedule").get<std::string>()
                                                              : j.at("schedule").dump();
        if (auto s = Schedule::parse(text))
            cfg.schedule = *s;
        else
            errs.push_back("schedule '" + text + "' not understood (use \"every\", \"h<int>\", or \"p<float>\")");
    }
    read_opt("step_scale", cfg.step_scale);
    read("step_exponent", cfg.step_exponent);
    read("r", cfg.r);
    read_opt("max_iters", cfg.max_iters);
    read_opt("target_gap", cfg.target_gap);
    read_opt("target_value", cfg.target_value);
    read_opt("time_budget", cfg.time_budget);
    read("stop_on_target", cfg.stop_on_target);
    read("record_every", cfg.record_every);
    read("workers", cfg.workers);

    if (!errs.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

// Fully resolved config, defaults expanded. config_from_json(config_to_json(c))
// reproduces c, which is what makes manifests sufficient to replay a run.
inline nlohmann::json config_to_json(const SimConfig& cfg) {
    nlohmann::json j;
    j["problem"] = cfg.problem.kind;
    j["dim"] = cfg.problem.dim;
    j["data_points"] = cfg.problem.data_points;
    j["nodes"] = cfg.problem.nodes;
    j["problem_seed"] = cfg.problem.seed;
    j["instance_file"] = cfg.problem.instance_file;
    j["topology"] = cfg.topology.kind;
    j["degree"] = cfg.topology.degree;
    j["topology_seed"] = cfg.topology.seed;
    j["schedule"] = cfg.schedule.label();
    if (cfg.step_scale)
        j["step_scale"] = *cfg.step_scale;
    else
        j["step_scale"] = nullptr;
    j["step_exponent"] = cfg.step_exponent;
    j["r"] = cfg.r;
    j["max_iters"] = cfg.max_iters ? nlohmann::json(*cfg.max_iters) : nlohmann::json(nullptr);
    j["target_gap"] = cfg.target_gap ? nlohmann::json(*cfg.target_gap) : nlohmann::json(nullptr);
    j["target_value"] =
        cfg.target_value ? nlohmann::json(*cfg.target_value) : nlohmann::json(nullptr);
    j["time_budget"] =
        cfg.time_budget ? nlohmann::json(*cfg.time_budget) : nlohmann::json(nullptr);
    j["stop_on_target"] = cfg.stop_on_target;
    j["record_every"] = cfg.record_every;
    j["workers"] = cfg.workers;
    return j;
}

// Written alongside every output CSV; holds everything needed to reproduce
// it: the resolved config, the toolkit version, and (when a run used an
// instance file) the instance itself inlined.
inline nlohmann::json make_manifest(const std::string& command, const SimConfig& cfg,
                                    const std::vector<std::string>& outputs) {
    nlohmann::json manifest;
    manifest["tool"] = "ddasim";
    manifest["version"] = version_string();
    manifest["command"] = command;
    manifest["config"] = config_to_json(cfg);
    if (!cfg.problem.instance_file.empty()) {
        std::ifstream in(cfg.problem.instance_file);
        if (in) {
            nlohmann::json inst;
            in >> inst;
            manifest["instance"] = std::move(inst);
        }
    }
    manifest["outputs"] = outputs;
    return manifest;
}

}  // namespace dda
