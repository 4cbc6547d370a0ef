#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "snnarm/harness.hpp"
#include "snnarm/stats.hpp"

namespace snnarm::io {

inline constexpr const char* kTrialCsvHeader =
    "scenario_id,phase,trial_index,target_index,steps,completed,final_distance,seed";

/// One data row of trials.csv.
std::string format_trial_row(const std::string& scenario_id, const harness::TrialRecord& r, std::uint64_t seed);

/// Marker row appended when a scenario diverged; phase column reads "error".
std::string format_error_row(const std::string& scenario_id, const harness::TrialDiverged& e, std::uint64_t seed);

struct TrialTable {
    std::string scenario_id;
    std::uint64_t seed = 0;
    std::vector<harness::TrialRecord> training;
    std::vector<harness::TrialRecord> evaluation;
    std::size_t error_rows = 0;

    std::size_t max_target_index() const;
};

/// Reads trials.csv; throws ConfigError naming the missing or malformed column.
TrialTable read_trials_csv(const std::filesystem::path& path);
TrialTable parse_trials_csv(std::istream& in);

/// Per-phase statistics plus the comparison when both phases have records.
struct RunSummary {
    std::string scenario_id;
    std::uint64_t seed = 0;
    std::size_t n_targets = 0;
    std::optional<stats::PhaseSummary> training;
    std::optional<stats::PhaseSummary> evaluation;
    std::optional<double> p_value;
    std::optional<double> improvement_fraction;
    stats::StatsConfig stats;
};

RunSummary summarize_records(const std::string& scenario_id, std::uint64_t seed, std::size_t n_targets,
                             const std::vector<harness::TrialRecord>& training,
                             const std::vector<harness::TrialRecord>& evaluation,
                             const stats::StatsConfig& stats_cfg);

nlohmann::json to_json(const RunSummary& s);

struct HistogramBin {
    harness::Phase phase;
    double low;
    double high;
    std::size_t count;
};

/// Equal-width bins over [0, step_limit]; the last bin is closed on the right.
std::vector<HistogramBin> histogram(const TrialTable& table, std::size_t bins, long step_limit);
std::string format_histogram(const std::vector<HistogramBin>& bins);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace snnarm::io
