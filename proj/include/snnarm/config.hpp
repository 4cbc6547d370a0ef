#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "snnarm/harness.hpp"
#include "snnarm/stats.hpp"

namespace snnarm::config {

/// Optional grid; an empty list leaves that parameter at the scenario value.
struct SweepConfig {
    std::vector<long> n_neurons;
    std::vector<double> learning_rate;
    std::vector<std::size_t> n_targets;
    // per_cell: every cell gets its own seed derived from (base seed, cell index).
    // shared: every cell reuses the base seed, so cells differ only in the swept values.
    enum class Seeds { per_cell, shared } seeds = Seeds::per_cell;

    bool empty() const { return n_neurons.empty() && learning_rate.empty() && n_targets.empty(); }
    std::size_t cell_count() const;
};

struct RunConfig {
    std::string name = "run";
    harness::ScenarioConfig scenario;
    stats::StatsConfig stats;  // seed is ignored; bootstrap seeds derive from scenario.seed
    SweepConfig sweep;
    std::string output_dir;  // empty: decided by the command line / environment
};

/// Parses the YAML config grammar documented in docs/config.md.
/// Throws ConfigError with the offending line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved config; its dump parses back with parse_config.
nlohmann::json to_json(const RunConfig& cfg);

/// One grid cell of a sweep: the base config with that cell's overrides and seed.
struct SweepCell {
    std::size_t index = 0;
    RunConfig config;
};

std::vector<SweepCell> expand_sweep(const RunConfig& base);

}  // namespace snnarm::config
