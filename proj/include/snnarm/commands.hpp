#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "snnarm/config.hpp"
#include "snnarm/io.hpp"

namespace snnarm::cli {

enum ExitCode : int { kSuccess = 0, kValidation = 1, kRuntime = 2 };

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "SNNARM_OUTPUT_ROOT";

/// --out if given, else the config's output_dir, else $SNNARM_OUTPUT_ROOT/<name>, else out/<name>.
std::filesystem::path resolve_output_dir(const config::RunConfig& cfg,
                                         const std::optional<std::filesystem::path>& out);

struct RunOutcome {
    io::RunSummary summary;
    bool diverged = false;
    std::string error;
};

/// Runs one scenario and writes trials.csv and summary.json into out_dir.
/// A diverging scenario still writes the rows completed so far plus an error row.
RunOutcome run_to_directory(const config::RunConfig& cfg, const std::filesystem::path& out_dir);

int cmd_run(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out,
            std::ostream& log);
int cmd_sweep(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out,
              std::size_t workers, std::ostream& log);
/// Recomputes the summary from trials.csv; prints it, and also writes it when `out` is given.
/// Bootstrap settings not given fall back to the sibling summary.json, then to the defaults.
int cmd_stats(const std::filesystem::path& trials_path, const std::optional<std::filesystem::path>& out,
              std::optional<std::size_t> resamples, std::optional<double> level, std::ostream& result,
              std::ostream& log);
/// Writes histogram.csv (default: next to the trials file). step_limit defaults to the
/// sibling summary.json's config, else 2000.
int cmd_hist(const std::filesystem::path& trials_path, std::size_t bins, std::optional<long> step_limit,
             const std::optional<std::filesystem::path>& out, std::ostream& log);

}  // namespace snnarm::cli
