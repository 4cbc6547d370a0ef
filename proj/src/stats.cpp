#include "snnarm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "snnarm/errors.hpp"
#include "snnarm/seeding.hpp"

namespace snnarm::stats {

using detail::require;

double mean(std::span<const double> xs) {
    require(!xs.empty(), "mean: empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    require(xs.size() >= 2, "variance: need at least two samples");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

double quantile_sorted(std::span<const double> sorted, double p) {
    require(!sorted.empty(), "quantile_sorted: empty sample");
    require(p >= 0.0 && p <= 1.0, "quantile_sorted: p outside [0, 1]");
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Interval bootstrap_mean_ci(std::span<const double> samples, std::size_t resamples, double level,
                           std::uint64_t seed) {
    require(!samples.empty(), "bootstrap_mean_ci: empty sample");
    require(resamples >= 1, "bootstrap_mean_ci: need at least one resample");
    require(level > 0.0 && level < 1.0, "bootstrap_mean_ci: level must be in (0, 1)");

    const std::size_t n = samples.size();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<double> means(resamples);
    for (auto& m : means) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += samples[pick(rng)];
        m = sum / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    return {quantile_sorted(means, 0.5 * (1.0 - level)), quantile_sorted(means, 0.5 * (1.0 + level))};
}

double welch_t_test(std::span<const double> a, std::span<const double> b) {
    require(a.size() >= 2 && b.size() >= 2, "welch_t_test: each group needs at least two samples");
    const double ma = mean(a), mb = mean(b);
    const double sa = variance(a) / static_cast<double>(a.size());
    const double sb = variance(b) / static_cast<double>(b.size());
    const double se2 = sa + sb;
    if (se2 == 0.0) return ma == mb ? 1.0 : 0.0;

    const double t = (ma - mb) / std::sqrt(se2);
    const double dof = se2 * se2 / (sa * sa / static_cast<double>(a.size() - 1) +
                                    sb * sb / static_cast<double>(b.size() - 1));
    const boost::math::students_t dist(dof);
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

std::vector<double> steps_of(std::span<const harness::TrialRecord> records) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(static_cast<double>(r.steps));
    return out;
}

PhaseSummary summarize_phase(std::span<const harness::TrialRecord> records, harness::Phase phase,
                             const StatsConfig& cfg) {
    require(!records.empty(), "summarize_phase: no records");
    const auto steps = steps_of(records);
    PhaseSummary s;
    s.count = records.size();
    s.mean = mean(steps);
    const auto stream_index = static_cast<std::uint64_t>(phase);
    s.ci = bootstrap_mean_ci(steps, cfg.resamples, cfg.level,
                             derive_seed(cfg.seed, Stream::bootstrap, stream_index));
    const auto done = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.completed; });
    s.completion_rate = static_cast<double>(done) / static_cast<double>(records.size());
    return s;
}

SummaryStats summarize(std::span<const harness::TrialRecord> training,
                       std::span<const harness::TrialRecord> evaluation, std::size_t n_targets,
                       const StatsConfig& cfg) {
    require(!training.empty() && !evaluation.empty(), "summarize: both phases need records");
    SummaryStats s;
    s.n_targets = n_targets;
    s.training = summarize_phase(training, harness::Phase::training, cfg);
    s.evaluation = summarize_phase(evaluation, harness::Phase::evaluation, cfg);
    const auto a = steps_of(training);
    const auto b = steps_of(evaluation);
    s.p_value = (a.size() >= 2 && b.size() >= 2) ? welch_t_test(a, b) : 1.0;
    s.improvement_fraction = s.training.mean > 0.0 ? (s.training.mean - s.evaluation.mean) / s.training.mean : 0.0;
    return s;
}

}  // namespace snnarm::stats
