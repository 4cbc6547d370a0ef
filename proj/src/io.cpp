#include "snnarm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "snnarm/errors.hpp"

namespace snnarm::io {

using harness::Phase;
using harness::TrialRecord;

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& column, std::size_t line) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("trials CSV: bad value '" + text + "' in column '" + column + "'",
                          static_cast<int>(line));
    return value;
}

std::string format_double(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace

std::string format_trial_row(const std::string& scenario_id, const TrialRecord& r, std::uint64_t seed) {
    std::ostringstream os;
    os << scenario_id << ',' << harness::to_string(r.phase) << ',' << r.trial_index << ',' << r.target_index << ','
       << r.steps << ',' << (r.completed ? 1 : 0) << ',' << format_double(r.final_distance, "%.9g") << ',' << seed;
    return os.str();
}

std::string format_error_row(const std::string& scenario_id, const harness::TrialDiverged& e, std::uint64_t seed) {
    std::ostringstream os;
    os << scenario_id << ",error," << e.trial_index << ',' << e.target_index << ',' << e.step() << ",0,nan," << seed;
    return os.str();
}

std::size_t TrialTable::max_target_index() const {
    std::size_t m = 0;
    for (const auto* phase : {&training, &evaluation})
        for (const auto& r : *phase) m = std::max(m, r.target_index);
    return m;
}

TrialTable parse_trials_csv(std::istream& in) {
    static const std::vector<std::string> required = split(kTrialCsvHeader);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("trials CSV: missing header row");
    const auto header = split(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const auto& name : required)
        if (!col.count(name)) throw ConfigError("trials CSV: missing column '" + name + "'", 1);

    TrialTable table;
    std::size_t line_no = 1;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size())
            throw ConfigError("trials CSV: row has " + std::to_string(fields.size()) + " fields, header has " +
                                  std::to_string(header.size()),
                              static_cast<int>(line_no));
        auto get = [&](const std::string& name) -> const std::string& { return fields[col.at(name)]; };
        const auto seed = parse_number<std::uint64_t>(get("seed"), "seed", line_no);
        if (first) {
            table.scenario_id = get("scenario_id");
            table.seed = seed;
            first = false;
        }
        if (get("phase") == "error") {
            ++table.error_rows;
            continue;
        }
        TrialRecord r;
        try {
            r.phase = harness::parse_phase(get("phase"));
        } catch (const ConfigError&) {
            throw ConfigError("trials CSV: bad value '" + get("phase") + "' in column 'phase'",
                              static_cast<int>(line_no));
        }
        r.trial_index = parse_number<std::size_t>(get("trial_index"), "trial_index", line_no);
        r.target_index = parse_number<std::size_t>(get("target_index"), "target_index", line_no);
        r.steps = parse_number<long>(get("steps"), "steps", line_no);
        const auto completed = get("completed");
        if (completed != "0" && completed != "1")
            throw ConfigError("trials CSV: bad value '" + completed + "' in column 'completed'",
                              static_cast<int>(line_no));
        r.completed = completed == "1";
        r.final_distance = parse_number<double>(get("final_distance"), "final_distance", line_no);
        (r.phase == Phase::training ? table.training : table.evaluation).push_back(r);
    }
    return table;
}

TrialTable read_trials_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trials CSV " + path.string());
    return parse_trials_csv(in);
}

RunSummary summarize_records(const std::string& scenario_id, std::uint64_t seed, std::size_t n_targets,
                             const std::vector<TrialRecord>& training, const std::vector<TrialRecord>& evaluation,
                             const stats::StatsConfig& stats_cfg) {
    RunSummary s;
    s.scenario_id = scenario_id;
    s.seed = seed;
    s.n_targets = n_targets;
    s.stats = stats_cfg;
    s.stats.seed = seed;
    if (!training.empty()) s.training = stats::summarize_phase(training, Phase::training, s.stats);
    if (!evaluation.empty()) s.evaluation = stats::summarize_phase(evaluation, Phase::evaluation, s.stats);
    if (s.training && s.evaluation) {
        const auto full = stats::summarize(training, evaluation, n_targets, s.stats);
        s.p_value = full.p_value;
        s.improvement_fraction = full.improvement_fraction;
    }
    return s;
}

nlohmann::json to_json(const RunSummary& s) {
    using nlohmann::json;
    auto phase = [](const std::optional<stats::PhaseSummary>& p) -> json {
        if (!p) return nullptr;
        return {{"count", p->count},
                {"mean_steps", p->mean},
                {"ci_low", p->ci.low},
                {"ci_high", p->ci.high},
                {"completion_rate", p->completion_rate}};
    };
    json j;
    j["scenario_id"] = s.scenario_id;
    j["seed"] = s.seed;
    j["n_targets"] = s.n_targets;
    j["training"] = phase(s.training);
    j["evaluation"] = phase(s.evaluation);
    if (s.p_value)
        j["comparison"] = {{"p_value", *s.p_value}, {"improvement_fraction", *s.improvement_fraction}};
    else
        j["comparison"] = nullptr;
    j["bootstrap"] = {{"resamples", s.stats.resamples}, {"level", s.stats.level}};
    return j;
}

std::vector<HistogramBin> histogram(const TrialTable& table, std::size_t bins, long step_limit) {
    if (bins < 1) throw ContractViolation("histogram: bins must be >= 1");
    if (step_limit < 1) throw ContractViolation("histogram: step_limit must be >= 1");
    const double width = static_cast<double>(step_limit) / static_cast<double>(bins);
    std::vector<HistogramBin> out;
    for (auto phase : {Phase::training, Phase::evaluation}) {
        const auto& recs = phase == Phase::training ? table.training : table.evaluation;
        if (recs.empty()) continue;
        std::vector<std::size_t> counts(bins, 0);
        for (const auto& r : recs) {
            const double v = std::clamp(static_cast<double>(r.steps), 0.0, static_cast<double>(step_limit));
            const auto b = std::min(static_cast<std::size_t>(std::floor(v / width)), bins - 1);
            ++counts[b];
        }
        for (std::size_t b = 0; b < bins; ++b)
            out.push_back({phase, static_cast<double>(b) * width,
                           b + 1 == bins ? static_cast<double>(step_limit) : static_cast<double>(b + 1) * width,
                           counts[b]});
    }
    return out;
}

std::string format_histogram(const std::vector<HistogramBin>& bins) {
    std::ostringstream os;
    os << "phase,bin_low,bin_high,count\n";
    for (const auto& b : bins)
        os << harness::to_string(b.phase) << ',' << format_double(b.low, "%.10g") << ','
           << format_double(b.high, "%.10g") << ',' << b.count << '\n';
    return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw Error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace snnarm::io
