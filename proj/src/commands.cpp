#include "snnarm/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "snnarm/errors.hpp"

namespace snnarm::cli {

namespace fs = std::filesystem;
using harness::Phase;
using harness::TrialRecord;

fs::path resolve_output_dir(const config::RunConfig& cfg, const std::optional<fs::path>& out) {
    if (out) return *out;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    if (const char* root = std::getenv(kOutputRootEnv); root && *root) return fs::path(root) / cfg.name;
    return fs::path("out") / cfg.name;
}

RunOutcome run_to_directory(const config::RunConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const auto& sc = cfg.scenario;
    std::string csv = std::string(io::kTrialCsvHeader) + "\n";
    std::vector<TrialRecord> training, evaluation;
    auto sink = [&](const TrialRecord& r) {
        csv += io::format_trial_row(cfg.name, r, sc.seed);
        csv += '\n';
        (r.phase == Phase::training ? training : evaluation).push_back(r);
    };

    RunOutcome outcome;
    try {
        harness::run_scenario(sc, sink);
    } catch (const harness::TrialDiverged& e) {
        csv += io::format_error_row(cfg.name, e, sc.seed);
        csv += '\n';
        outcome.diverged = true;
        outcome.error = e.what();
    }
    io::write_atomic(out_dir / "trials.csv", csv);

    outcome.summary = io::summarize_records(cfg.name, sc.seed, sc.n_targets, training, evaluation, cfg.stats);
    auto j = io::to_json(outcome.summary);
    j["status"] = outcome.diverged ? "diverged" : "ok";
    if (outcome.diverged) j["error"] = outcome.error;
    j["config"] = config::to_json(cfg);
    io::write_atomic(out_dir / "summary.json", j.dump(2) + "\n");
    return outcome;
}

int cmd_run(const fs::path& config_path, const std::optional<fs::path>& out, std::ostream& log) {
    config::RunConfig cfg;
    try {
        cfg = config::load_config(config_path);
    } catch (const ConfigError& e) {
        log << "config error: " << config_path.string() << ": " << e.what() << '\n';
        return kValidation;
    }
    try {
        const auto dir = resolve_output_dir(cfg, out);
        const auto outcome = run_to_directory(cfg, dir);
        if (outcome.diverged) {
            log << "simulation diverged: " << outcome.error << '\n';
            return kRuntime;
        }
        log << "wrote " << (dir / "trials.csv").string() << " and " << (dir / "summary.json").string() << '\n';
        return kSuccess;
    } catch (const ConfigError& e) {
        log << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kRuntime;
    }
}

namespace {

std::string opt_num(const std::optional<double>& v) {
    if (!v) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", *v);
    return buf;
}

std::string sweep_row(const config::SweepCell& cell, const std::string& status, const io::RunSummary* s) {
    const auto& sc = cell.config.scenario;
    std::ostringstream os;
    os << cell.config.name << ',' << status << ',' << sc.ensemble.n_neurons << ',' << opt_num(sc.learning_rate)
       << ',' << sc.n_targets << ',' << sc.seed;
    auto phase = [&](const std::optional<stats::PhaseSummary>& p) {
        if (p)
            os << ',' << p->count << ',' << opt_num(p->mean) << ',' << opt_num(p->ci.low) << ','
               << opt_num(p->ci.high) << ',' << opt_num(p->completion_rate);
        else
            os << ",,,,,";
    };
    if (s) {
        phase(s->training);
        phase(s->evaluation);
        os << ',' << opt_num(s->p_value) << ',' << opt_num(s->improvement_fraction);
    } else {
        os << ",,,,,,,,,,,,";
    }
    return os.str();
}

}  // namespace

int cmd_sweep(const fs::path& config_path, const std::optional<fs::path>& out, std::size_t workers,
              std::ostream& log) {
    config::RunConfig cfg;
    try {
        cfg = config::load_config(config_path);
    } catch (const ConfigError& e) {
        log << "config error: " << config_path.string() << ": " << e.what() << '\n';
        return kValidation;
    }
    if (cfg.sweep.empty()) return cmd_run(config_path, out, log);

    const auto dir = resolve_output_dir(cfg, out);
    const auto cells = config::expand_sweep(cfg);
    try {
        fs::create_directories(dir);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kRuntime;
    }

    std::vector<std::string> rows(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const auto& cell = cells[i];
            std::string status = "ok";
            std::optional<io::RunSummary> summary;
            std::string message;
            try {
                cell.config.scenario.validate();
                auto outcome = run_to_directory(cell.config, dir / cell.config.name);
                if (outcome.diverged) {
                    status = "failed";
                    message = outcome.error;
                }
                summary = std::move(outcome.summary);
            } catch (const std::exception& e) {
                status = "failed";
                message = e.what();
            }
            rows[i] = sweep_row(cell, status, summary ? &*summary : nullptr);
            std::lock_guard lock(log_mutex);
            log << cell.config.name << ": " << status << (message.empty() ? "" : " (" + message + ")") << '\n';
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, cells.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    std::string csv =
        "cell,status,n_neurons,learning_rate,n_targets,seed,"
        "training_count,training_mean,training_ci_low,training_ci_high,training_completion,"
        "evaluation_count,evaluation_mean,evaluation_ci_low,evaluation_ci_high,evaluation_completion,"
        "p_value,improvement_fraction\n";
    bool any_failed = false;
    for (const auto& r : rows) {
        csv += r + '\n';
        any_failed |= r.find(",failed,") != std::string::npos;
    }
    io::write_atomic(dir / "sweep_summary.csv", csv);
    log << "wrote " << (dir / "sweep_summary.csv").string() << '\n';
    return any_failed ? kRuntime : kSuccess;
}

int cmd_stats(const fs::path& trials_path, const std::optional<fs::path>& out, std::optional<std::size_t> resamples,
              std::optional<double> level, std::ostream& result, std::ostream& log) {
    stats::StatsConfig stats_cfg;
    if (const auto sibling = trials_path.parent_path() / "summary.json"; fs::exists(sibling)) {
        try {
            std::ifstream in(sibling);
            const auto j = nlohmann::json::parse(in).at("bootstrap");
            stats_cfg.resamples = j.at("resamples").get<std::size_t>();
            stats_cfg.level = j.at("level").get<double>();
        } catch (const std::exception&) {
            log << "note: ignoring unreadable " << sibling.string() << '\n';
        }
    }
    if (resamples) stats_cfg.resamples = *resamples;
    if (level) stats_cfg.level = *level;
    if (stats_cfg.resamples < 1 || !(stats_cfg.level > 0.0 && stats_cfg.level < 1.0)) {
        log << "validation error: resamples must be >= 1 and level in (0, 1)\n";
        return kValidation;
    }
    io::TrialTable table;
    try {
        table = io::read_trials_csv(trials_path);
    } catch (const ConfigError& e) {
        log << "schema error: " << e.what() << '\n';
        return kValidation;
    }
    if (table.training.empty() && table.evaluation.empty()) {
        log << "schema error: no trial rows in " << trials_path.string() << '\n';
        return kValidation;
    }
    if (table.error_rows) log << "note: skipped " << table.error_rows << " error row(s)\n";
    try {
        const auto s = io::summarize_records(table.scenario_id, table.seed, table.max_target_index(), table.training,
                                             table.evaluation, stats_cfg);
        const auto text = io::to_json(s).dump(2) + "\n";
        result << text;
        if (out) io::write_atomic(*out, text);
        return kSuccess;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kRuntime;
    }
}

int cmd_hist(const fs::path& trials_path, std::size_t bins, std::optional<long> step_limit,
             const std::optional<fs::path>& out, std::ostream& log) {
    if (bins < 1) {
        log << "validation error: --bins must be >= 1\n";
        return kValidation;
    }
    io::TrialTable table;
    try {
        table = io::read_trials_csv(trials_path);
    } catch (const ConfigError& e) {
        log << "schema error: " << e.what() << '\n';
        return kValidation;
    }
    long limit = 2000;
    if (step_limit) {
        limit = *step_limit;
    } else if (const auto sibling = trials_path.parent_path() / "summary.json"; fs::exists(sibling)) {
        try {
            std::ifstream in(sibling);
            const auto j = nlohmann::json::parse(in);
            limit = j.at("config").at("scenario").at("step_limit").get<long>();
        } catch (const std::exception&) {
            log << "note: could not read step_limit from " << sibling.string() << ", using 2000\n";
        }
    }
    if (limit < 1) {
        log << "validation error: step limit must be >= 1\n";
        return kValidation;
    }
    try {
        const auto target = out ? *out : trials_path.parent_path() / "histogram.csv";
        io::write_atomic(target, io::format_histogram(io::histogram(table, bins, limit)));
        log << "wrote " << target.string() << '\n';
        return kSuccess;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kRuntime;
    }
}

}  // namespace snnarm::cli
