#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "snnarm/armsim.hpp"
#include "snnarm/controller.hpp"
#include "snnarm/errors.hpp"
#include "snnarm/neuro.hpp"

namespace snnarm::harness {

enum class Ablation { full_learning, freeze_after_training, no_training, learning_rate_zero };
enum class Phase { training, evaluation };

std::string_view to_string(Ablation a);
std::string_view to_string(Phase p);
Ablation parse_ablation(std::string_view s);  // throws ConfigError
Phase parse_phase(std::string_view s);        // throws ConfigError

struct ControllerConfig {
    control::PdGains gains;
    control::InputMode input_mode = control::InputMode::state;
    double q_bound = 3.141592653589793;  // rad, symmetric per joint
    double dq_bound = 5.0;               // rad/s, symmetric per joint
    bool anti_windup = true;             // pause learning while the torque clamp is active
};

struct ScenarioConfig {
    std::size_t n_targets = 6;
    std::uint64_t seed = 1;
    std::size_t training_cycles = 20;
    std::size_t eval_trials = 1000;
    long step_limit = 2000;
    double payload_mass = 1.0;  // kg, overrides arm.payload_mass
    Ablation ablation = Ablation::full_learning;
    double tol_frac = 0.015;
    double init_offset = 0.3;  // rad added to every joint of IK(first target)
    double target_min_frac = 0.3;
    double target_max_frac = 0.9;

    arm::ArmModel arm = arm::default_model();
    ControllerConfig controller;
    neuro::EnsembleSpec ensemble;
    double learning_rate = 0.0;

    void validate() const;  // throws ConfigError
};

struct TrialRecord {
    Phase phase = Phase::training;
    std::size_t trial_index = 0;   // 1-based within its phase
    std::size_t target_index = 0;  // 1-based
    long steps = 0;
    bool completed = false;
    double final_distance = 0.0;  // m

    bool operator==(const TrialRecord&) const = default;
};

/// Raised when the plant blows up mid-scenario; carries where it happened.
class TrialDiverged : public SimulationDiverged {
public:
    TrialDiverged(const std::string& what, Phase phase, std::size_t trial_index,
                  std::size_t target_index, long step)
        : SimulationDiverged(what, step), phase(phase), trial_index(trial_index), target_index(target_index) {}

    Phase phase;
    std::size_t trial_index;
    std::size_t target_index;
};

/// One control step as seen by an observer.
struct StepInfo {
    const Eigen::VectorXd& q;
    const Eigen::VectorXd& dq;
    const Eigen::VectorXd& q_target;
    const Eigen::VectorXd& pd;
    const Eigen::VectorXd& adaptive;
    const Eigen::VectorXd& torque;  // after clamping
};

using StepObserver = std::function<void(const StepInfo&)>;
using RecordSink = std::function<void(const TrialRecord&)>;

/// Samples n targets uniformly over the annulus [min_frac, max_frac] * reach.
/// Targets are numbered 1..n in sampling order.
std::vector<arm::Target> generate_targets(const arm::ArmModel& model, std::size_t n, std::uint64_t seed,
                                          double min_frac = 0.3, double max_frac = 0.9);

struct TrialOutcome {
    TrialRecord record;
    arm::ArmState state;
};

/// Drives the arm toward `target` for at most step_limit steps and stops at the
/// first step where it is within tolerance. The returned record has phase,
/// trial_index and target_index left for the caller to fill.
TrialOutcome run_trial(control::AdaptiveController& ctrl, const arm::ArmModel& model,
                       arm::ArmState state, const arm::Target& target, long step_limit,
                       double tol_frac, const StepObserver& observer = {});

/// A scenario owns its plant, targets and adaptive controller; the arm state
/// and learned decoders carry over between trials and phases.
class Scenario {
public:
    explicit Scenario(ScenarioConfig cfg);

    const ScenarioConfig& config() const { return cfg_; }
    const arm::ArmModel& model() const { return model_; }
    const std::vector<arm::Target>& targets() const { return targets_; }
    const control::AdaptiveController& controller() const { return ctrl_; }
    const arm::ArmState& arm_state() const { return state_; }

    void set_step_observer(StepObserver observer) { observer_ = std::move(observer); }

    /// Ordered cycles 1 -> 2 -> ... -> n, repeated training_cycles times.
    std::vector<TrialRecord> run_training_phase(const RecordSink& sink = {});
    /// eval_trials trials toward random targets, never the one just visited.
    std::vector<TrialRecord> run_evaluation_phase(const RecordSink& sink = {});

private:
    TrialRecord run_one(Phase phase, std::size_t trial_index, const arm::Target& target);

    ScenarioConfig cfg_;
    arm::ArmModel model_;
    std::vector<arm::Target> targets_;
    control::AdaptiveController ctrl_;
    arm::ArmState state_;
    std::size_t last_target_ = 0;  // 0 = none yet
    StepObserver observer_;
};

struct ScenarioResult {
    std::vector<TrialRecord> training;
    std::vector<TrialRecord> evaluation;
};

/// Training then evaluation, as the ablation prescribes.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const RecordSink& sink = {});

}  // namespace snnarm::harness
