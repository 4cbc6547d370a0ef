#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "snnarm/harness.hpp"

namespace snnarm::stats {

struct Interval {
    double low = 0.0;
    double high = 0.0;

    bool contains(double v) const { return low <= v && v <= high; }
    bool operator==(const Interval&) const = default;
};

struct StatsConfig {
    std::size_t resamples = 10000;
    double level = 0.95;
    std::uint64_t seed = 0;
};

double mean(std::span<const double> xs);
/// Unbiased (n - 1) sample variance.
double variance(std::span<const double> xs);

/// Linear interpolation between order statistics of an ascending sample, p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

/// Percentile bootstrap interval for the mean. Resample indices come from a
/// std::mt19937_64 seeded with `seed`, drawn with
/// std::uniform_int_distribution<std::size_t>(0, n - 1), n per resample.
Interval bootstrap_mean_ci(std::span<const double> samples, std::size_t resamples, double level,
                           std::uint64_t seed);

/// Two-sided Welch t-test p-value. Two zero-variance groups give 1 when the
/// means are equal and 0 otherwise.
double welch_t_test(std::span<const double> a, std::span<const double> b);

struct PhaseSummary {
    std::size_t count = 0;
    double mean = 0.0;
    Interval ci;
    double completion_rate = 0.0;

    bool operator==(const PhaseSummary&) const = default;
};

/// Table-style comparison of training against evaluation time-to-target.
struct SummaryStats {
    std::size_t n_targets = 0;
    PhaseSummary training;
    PhaseSummary evaluation;
    double p_value = 1.0;
    double improvement_fraction = 0.0;  // (mean_training - mean_evaluation) / mean_training

    double mean_training() const { return training.mean; }
    double mean_evaluation() const { return evaluation.mean; }
    bool cis_disjoint() const {
        return training.ci.high < evaluation.ci.low || evaluation.ci.high < training.ci.low;
    }
    bool operator==(const SummaryStats&) const = default;
};

/// Steps of every record; timed-out trials count at the step limit.
std::vector<double> steps_of(std::span<const harness::TrialRecord> records);

/// Bootstrap seeds are derived from cfg.seed per phase so the two intervals are independent.
PhaseSummary summarize_phase(std::span<const harness::TrialRecord> records, harness::Phase phase,
                             const StatsConfig& cfg);

SummaryStats summarize(std::span<const harness::TrialRecord> training,
                       std::span<const harness::TrialRecord> evaluation, std::size_t n_targets,
                       const StatsConfig& cfg);

}  // namespace snnarm::stats
