#include "snnarm/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "snnarm/errors.hpp"
#include "snnarm/seeding.hpp"

namespace snnarm::config {

namespace {

using harness::ScenarioConfig;

int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

/// Rejects keys outside `allowed` so typos fail loudly.
void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& section) {
    if (!map.IsMap()) throw ConfigError("'" + section + "' must be a mapping", line_of(map));
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + key + "' in '" + section + "'", line_of(kv.first));
    }
}

template <typename T>
void read(const YAML::Node& map, const char* key, T& out) {
    const YAML::Node node = map[key];
    if (!node) return;
    try {
        out = node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(std::string("bad value for '") + key + "'", line_of(node));
    }
}

Eigen::VectorXd read_vector(const YAML::Node& node, const char* key) {
    try {
        const auto v = node.as<std::vector<double>>();
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    } catch (const YAML::Exception&) {
        throw ConfigError(std::string("'") + key + "' must be a list of numbers", line_of(node));
    }
}

std::pair<double, double> read_range(const YAML::Node& node, const char* key) {
    const auto v = read_vector(node, key);
    if (v.size() != 2 || v[0] > v[1])
        throw ConfigError(std::string("'") + key + "' must be [low, high]", line_of(node));
    return {v[0], v[1]};
}

template <typename T>
std::vector<T> read_list(const YAML::Node& node, const char* key) {
    try {
        auto v = node.as<std::vector<T>>();
        if (v.empty()) throw ConfigError(std::string("sweep list '") + key + "' is empty", line_of(node));
        return v;
    } catch (const YAML::Exception&) {
        throw ConfigError(std::string("sweep '") + key + "' must be a list", line_of(node));
    }
}

void parse_scenario(const YAML::Node& node, ScenarioConfig& s) {
    check_keys(node,
               {"n_targets", "seed", "training_cycles", "eval_trials", "step_limit", "payload_mass_kg",
                "ablation", "tol_frac", "init_offset_rad", "target_radius_min_frac", "target_radius_max_frac"},
               "scenario");
    read(node, "n_targets", s.n_targets);
    read(node, "seed", s.seed);
    read(node, "training_cycles", s.training_cycles);
    read(node, "eval_trials", s.eval_trials);
    read(node, "step_limit", s.step_limit);
    read(node, "payload_mass_kg", s.payload_mass);
    read(node, "tol_frac", s.tol_frac);
    read(node, "init_offset_rad", s.init_offset);
    read(node, "target_radius_min_frac", s.target_min_frac);
    read(node, "target_radius_max_frac", s.target_max_frac);
    if (node["ablation"]) {
        try {
            s.ablation = harness::parse_ablation(node["ablation"].as<std::string>());
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), line_of(node["ablation"]));
        }
    }
}

void parse_arm(const YAML::Node& node, ScenarioConfig& s) {
    check_keys(node,
               {"link_lengths_m", "link_masses_kg", "link_inertias_kgm2", "joint_friction_nms_per_rad",
                "gravity_mps2", "max_torque_nm", "dt_s"},
               "arm");
    auto& arm = s.arm;
    const bool new_links = node["link_lengths_m"] || node["link_masses_kg"];
    if (node["link_lengths_m"]) arm.link_lengths = read_vector(node["link_lengths_m"], "link_lengths_m");
    if (node["link_masses_kg"]) arm.link_masses = read_vector(node["link_masses_kg"], "link_masses_kg");
    if (arm.link_lengths.size() != arm.link_masses.size())
        throw ConfigError("link_lengths_m and link_masses_kg differ in length", line_of(node));
    if (node["link_inertias_kgm2"]) {
        arm.link_inertias = read_vector(node["link_inertias_kgm2"], "link_inertias_kgm2");
    } else if (new_links) {
        arm.link_inertias = (arm.link_masses.array() * arm.link_lengths.array().square() / 12.0).matrix();
    }
    read(node, "joint_friction_nms_per_rad", arm.joint_friction);
    read(node, "gravity_mps2", arm.gravity);
    read(node, "max_torque_nm", arm.max_torque);
    read(node, "dt_s", arm.dt);
}

void parse_controller(const YAML::Node& node, ScenarioConfig& s) {
    check_keys(node, {"kp_nm_per_rad", "kd_nms_per_rad", "input_mode", "q_bound_rad", "dq_bound_radps",
                      "anti_windup"},
               "controller");
    auto& c = s.controller;
    read(node, "kp_nm_per_rad", c.gains.kp);
    read(node, "kd_nms_per_rad", c.gains.kd);
    read(node, "q_bound_rad", c.q_bound);
    read(node, "dq_bound_radps", c.dq_bound);
    read(node, "anti_windup", c.anti_windup);
    if (node["input_mode"]) {
        const auto m = node["input_mode"].as<std::string>();
        if (m == "state") c.input_mode = control::InputMode::state;
        else if (m == "error") c.input_mode = control::InputMode::error;
        else throw ConfigError("input_mode must be 'state' or 'error'", line_of(node["input_mode"]));
    }
}

void parse_ensemble(const YAML::Node& node, ScenarioConfig& s) {
    check_keys(node,
               {"n_neurons", "mode", "learning_rate", "tau_rc_s", "tau_ref_s", "tau_syn_s", "max_rate_hz",
                "intercepts"},
               "ensemble");
    auto& e = s.ensemble;
    read(node, "n_neurons", e.n_neurons);
    read(node, "learning_rate", s.learning_rate);
    read(node, "tau_rc_s", e.lif.tau_rc);
    read(node, "tau_ref_s", e.lif.tau_ref);
    read(node, "tau_syn_s", e.tau_syn);
    if (node["max_rate_hz"]) std::tie(e.max_rate_low, e.max_rate_high) = read_range(node["max_rate_hz"], "max_rate_hz");
    if (node["intercepts"]) std::tie(e.intercept_low, e.intercept_high) = read_range(node["intercepts"], "intercepts");
    if (node["mode"]) {
        const auto m = node["mode"].as<std::string>();
        if (m == "rate") e.mode = neuro::NeuronMode::rate;
        else if (m == "spiking") e.mode = neuro::NeuronMode::spiking;
        else throw ConfigError("mode must be 'rate' or 'spiking'", line_of(node["mode"]));
    }
}

}  // namespace

std::size_t SweepConfig::cell_count() const {
    auto len = [](std::size_t n) { return n == 0 ? std::size_t{1} : n; };
    return len(n_neurons.size()) * len(learning_rate.size()) * len(n_targets.size());
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1);
    }
    RunConfig cfg;
    if (!root || root.IsNull()) return cfg;
    check_keys(root, {"name", "output_dir", "scenario", "arm", "controller", "ensemble", "stats", "sweep"}, "top level");
    read(root, "name", cfg.name);
    read(root, "output_dir", cfg.output_dir);
    for (char c : cfg.name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
            throw ConfigError("name may only contain letters, digits, '_', '-' and '.'", line_of(root["name"]));

    auto& s = cfg.scenario;
    if (root["scenario"]) parse_scenario(root["scenario"], s);
    if (root["arm"]) parse_arm(root["arm"], s);
    if (root["controller"]) parse_controller(root["controller"], s);
    if (root["ensemble"]) parse_ensemble(root["ensemble"], s);
    s.ensemble.lif.dt = s.arm.dt;
    if (const auto st = root["stats"]) {
        check_keys(st, {"resamples", "level"}, "stats");
        read(st, "resamples", cfg.stats.resamples);
        read(st, "level", cfg.stats.level);
        if (cfg.stats.resamples < 1) throw ConfigError("stats.resamples must be >= 1", line_of(st));
        if (!(cfg.stats.level > 0.0 && cfg.stats.level < 1.0))
            throw ConfigError("stats.level must be in (0, 1)", line_of(st));
    }
    if (const auto sw = root["sweep"]) {
        if (!sw.IsNull()) {
            check_keys(sw, {"n_neurons", "learning_rate", "n_targets", "seeds"}, "sweep");
            if (sw["n_neurons"]) cfg.sweep.n_neurons = read_list<long>(sw["n_neurons"], "n_neurons");
            if (sw["learning_rate"]) cfg.sweep.learning_rate = read_list<double>(sw["learning_rate"], "learning_rate");
            if (sw["n_targets"]) cfg.sweep.n_targets = read_list<std::size_t>(sw["n_targets"], "n_targets");
            if (const auto seeds = sw["seeds"]) {
                const auto mode = seeds.as<std::string>();
                if (mode == "per_cell") cfg.sweep.seeds = SweepConfig::Seeds::per_cell;
                else if (mode == "shared") cfg.sweep.seeds = SweepConfig::Seeds::shared;
                else throw ConfigError("sweep.seeds must be 'per_cell' or 'shared'", line_of(seeds));
            }
        }
    }
    s.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

nlohmann::json to_json(const RunConfig& cfg) {
    using nlohmann::json;
    const auto& s = cfg.scenario;
    auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    json j;
    j["name"] = cfg.name;
    if (!cfg.output_dir.empty()) j["output_dir"] = cfg.output_dir;
    j["scenario"] = {
        {"n_targets", s.n_targets},
        {"seed", s.seed},
        {"training_cycles", s.training_cycles},
        {"eval_trials", s.eval_trials},
        {"step_limit", s.step_limit},
        {"payload_mass_kg", s.payload_mass},
        {"ablation", std::string(harness::to_string(s.ablation))},
        {"tol_frac", s.tol_frac},
        {"init_offset_rad", s.init_offset},
        {"target_radius_min_frac", s.target_min_frac},
        {"target_radius_max_frac", s.target_max_frac},
    };
    j["arm"] = {
        {"link_lengths_m", vec(s.arm.link_lengths)},
        {"link_masses_kg", vec(s.arm.link_masses)},
        {"link_inertias_kgm2", vec(s.arm.link_inertias)},
        {"joint_friction_nms_per_rad", s.arm.joint_friction},
        {"gravity_mps2", s.arm.gravity},
        {"max_torque_nm", s.arm.max_torque},
        {"dt_s", s.arm.dt},
    };
    j["controller"] = {
        {"kp_nm_per_rad", s.controller.gains.kp},
        {"kd_nms_per_rad", s.controller.gains.kd},
        {"input_mode", s.controller.input_mode == control::InputMode::state ? "state" : "error"},
        {"q_bound_rad", s.controller.q_bound},
        {"dq_bound_radps", s.controller.dq_bound},
        {"anti_windup", s.controller.anti_windup},
    };
    j["ensemble"] = {
        {"n_neurons", s.ensemble.n_neurons},
        {"mode", s.ensemble.mode == neuro::NeuronMode::rate ? "rate" : "spiking"},
        {"learning_rate", s.learning_rate},
        {"tau_rc_s", s.ensemble.lif.tau_rc},
        {"tau_ref_s", s.ensemble.lif.tau_ref},
        {"tau_syn_s", s.ensemble.tau_syn},
        {"max_rate_hz", {s.ensemble.max_rate_low, s.ensemble.max_rate_high}},
        {"intercepts", {s.ensemble.intercept_low, s.ensemble.intercept_high}},
    };
    j["stats"] = {{"resamples", cfg.stats.resamples}, {"level", cfg.stats.level}};
    if (!cfg.sweep.empty()) {
        json sw = json::object();
        if (!cfg.sweep.n_neurons.empty()) sw["n_neurons"] = cfg.sweep.n_neurons;
        if (!cfg.sweep.learning_rate.empty()) sw["learning_rate"] = cfg.sweep.learning_rate;
        if (!cfg.sweep.n_targets.empty()) sw["n_targets"] = cfg.sweep.n_targets;
        sw["seeds"] = cfg.sweep.seeds == SweepConfig::Seeds::shared ? "shared" : "per_cell";
        j["sweep"] = sw;
    }
    return j;
}

std::vector<SweepCell> expand_sweep(const RunConfig& base) {
    const auto& sw = base.sweep;
    const std::vector<long> neurons = sw.n_neurons.empty() ? std::vector<long>{static_cast<long>(base.scenario.ensemble.n_neurons)} : sw.n_neurons;
    const std::vector<double> rates = sw.learning_rate.empty() ? std::vector<double>{base.scenario.learning_rate} : sw.learning_rate;
    const std::vector<std::size_t> counts = sw.n_targets.empty() ? std::vector<std::size_t>{base.scenario.n_targets} : sw.n_targets;

    std::vector<SweepCell> cells;
    cells.reserve(base.sweep.cell_count());
    for (long n : neurons)
        for (double lr : rates)
            for (std::size_t nt : counts) {
                SweepCell cell{cells.size(), base};
                cell.config.sweep = {};
                auto& s = cell.config.scenario;
                s.ensemble.n_neurons = n;
                s.learning_rate = lr;
                s.n_targets = nt;
                if (sw.seeds == SweepConfig::Seeds::per_cell)
                    s.seed = derive_seed(base.scenario.seed, Stream::sweep_cell, cell.index);
                char name[32];
                std::snprintf(name, sizeof name, "cell_%03zu", cell.index);
                cell.config.name = name;
                cells.push_back(std::move(cell));
            }
    return cells;
}

}  // namespace snnarm::config
