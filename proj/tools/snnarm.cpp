// snnarm: run adaptive-arm reach scenarios, sweeps, and their statistics.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "snnarm/commands.hpp"

int main(int argc, char** argv) {
    namespace cli = snnarm::cli;
    CLI::App app{"Spiking adaptive arm controller: reach-task simulator and experiment harness"};
    app.require_subcommand(1);

    std::string config_path, trials_path, out;
    std::size_t workers = 1, bins = 20;
    long step_limit = 0;
    std::size_t resamples = 0;
    double level = 0.0;

    auto* run = app.add_subcommand("run", "Run one scenario; writes trials.csv and summary.json");
    run->add_option("--config", config_path, "Scenario config (YAML)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory");

    auto* sweep = app.add_subcommand("sweep", "Run every cell of the config's sweep grid");
    sweep->add_option("--config", config_path, "Sweep config (YAML)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out, "Output directory");
    sweep->add_option("--workers", workers, "Concurrent cells")->check(CLI::PositiveNumber);

    auto* stats = app.add_subcommand("stats", "Recompute summary statistics from trials.csv");
    stats->add_option("--trials", trials_path, "trials.csv")->required()->check(CLI::ExistingFile);
    stats->add_option("--out", out, "Also write the summary JSON here");
    auto* resamples_opt = stats->add_option("--resamples", resamples, "Bootstrap resamples");
    auto* level_opt = stats->add_option("--level", level, "Confidence level");

    auto* hist = app.add_subcommand("hist", "Bin time-to-target per phase into histogram.csv");
    hist->add_option("--trials", trials_path, "trials.csv")->required()->check(CLI::ExistingFile);
    hist->add_option("--bins", bins, "Number of equal-width bins")->required();
    auto* limit_opt = hist->add_option("--step-limit", step_limit, "Upper edge of the last bin");
    hist->add_option("--out", out, "Output path (default: histogram.csv next to the trials)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cli::kSuccess : cli::kValidation;
    }

    const auto out_opt = out.empty() ? std::nullopt : std::optional<std::filesystem::path>(out);
    if (*run) return cli::cmd_run(config_path, out_opt, std::cerr);
    if (*sweep) return cli::cmd_sweep(config_path, out_opt, workers, std::cerr);
    if (*stats)
        return cli::cmd_stats(trials_path, out_opt,
                              *resamples_opt ? std::optional<std::size_t>(resamples) : std::nullopt,
                              *level_opt ? std::optional<double>(level) : std::nullopt, std::cout, std::cerr);
    if (*hist)
        return cli::cmd_hist(trials_path, bins, *limit_opt ? std::optional<long>(step_limit) : std::nullopt,
                             out_opt, std::cerr);
    return cli::kValidation;
}
