#include "snnarm/harness.hpp"

#include <cmath>
#include <random>

#include "snnarm/seeding.hpp"

namespace snnarm::harness {

std::string_view to_string(Ablation a) {
    switch (a) {
        case Ablation::full_learning: return "full_learning";
        case Ablation::freeze_after_training: return "freeze_after_training";
        case Ablation::no_training: return "no_training";
        case Ablation::learning_rate_zero: return "learning_rate_zero";
    }
    return "?";
}

std::string_view to_string(Phase p) { return p == Phase::training ? "training" : "evaluation"; }

Ablation parse_ablation(std::string_view s) {
    for (auto a : {Ablation::full_learning, Ablation::freeze_after_training, Ablation::no_training,
                   Ablation::learning_rate_zero})
        if (s == to_string(a)) return a;
    throw ConfigError("unknown ablation '" + std::string(s) + "'");
}

Phase parse_phase(std::string_view s) {
    if (s == "training") return Phase::training;
    if (s == "evaluation") return Phase::evaluation;
    throw ConfigError("unknown phase '" + std::string(s) + "'");
}

void ScenarioConfig::validate() const {
    auto check = [](bool ok, const char* msg) {
        if (!ok) throw ConfigError(msg);
    };
    check(n_targets >= 2, "n_targets must be at least 2");
    check(step_limit >= 1, "step_limit must be at least 1");
    check(payload_mass >= 0.0, "payload_mass_kg must be non-negative");
    check(tol_frac > 0.0, "tol_frac must be positive");
    check(target_min_frac >= 0.0 && target_min_frac < target_max_frac && target_max_frac <= 1.0,
          "target radius fractions must satisfy 0 <= min < max <= 1");
    check(learning_rate >= 0.0 && std::isfinite(learning_rate), "learning_rate must be finite and >= 0");
    check(controller.q_bound > 0.0 && controller.dq_bound > 0.0, "normalization bounds must be positive");
    check(ensemble.n_neurons >= 1, "n_neurons must be at least 1");
    try {
        arm.validate();
        controller.gains.validate();
        ensemble.lif.validate();
    } catch (const ContractViolation& e) {
        throw ConfigError(e.what());
    }
    check(std::abs(ensemble.lif.dt - arm.dt) < 1e-15, "ensemble and arm must share dt");
}

std::vector<arm::Target> generate_targets(const arm::ArmModel& model, std::size_t n, std::uint64_t seed,
                                          double min_frac, double max_frac) {
    if (n < 2) throw ConfigError("generate_targets: need at least 2 targets");
    const double r_min = min_frac * model.reach();
    const double r_max = max_frac * model.reach();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-r_max, r_max);

    std::vector<arm::Target> targets;
    targets.reserve(n);
    long rejections = 0;
    while (targets.size() < n) {
        const arm::Vector2d p(coord(rng), coord(rng));
        const double r = p.norm();
        if (r >= r_min && r <= r_max) {
            try {
                targets.push_back({p, arm::inverse_kinematics(model, p), targets.size() + 1});
                continue;
            } catch (const UnreachableTarget&) {
            } catch (const ConvergenceError&) {
            }
        }
        if (++rejections > 10000) throw ConfigError("generate_targets: too many rejected samples");
    }
    return targets;
}

TrialOutcome run_trial(control::AdaptiveController& ctrl, const arm::ArmModel& model,
                       arm::ArmState state, const arm::Target& target, long step_limit,
                       double tol_frac, const StepObserver& observer) {
    TrialOutcome out;
    if (arm::reached(model, state, target, tol_frac)) {
        out.record.steps = 0;
        out.record.completed = true;
    } else {
        out.record.steps = step_limit;
        for (long step = 1; step <= step_limit; ++step) {
            const Eigen::VectorXd torque =
                arm::clamp_torque(model, control::adaptive_torque(ctrl, state.q, state.dq, target.q_target));
            if (observer)
                observer(StepInfo{state.q, state.dq, target.q_target, ctrl.last_pd, ctrl.last_adaptive, torque});
            try {
                state = arm::dynamics_step(model, state, torque);
            } catch (const SimulationDiverged& e) {
                throw SimulationDiverged(e.what(), step);
            }
            if (arm::reached(model, state, target, tol_frac)) {
                out.record.steps = step;
                out.record.completed = true;
                break;
            }
        }
    }
    out.record.final_distance = arm::distance_to(model, state, target);
    out.state = std::move(state);
    return out;
}

namespace {

arm::ArmModel loaded_model(const ScenarioConfig& cfg) {
    arm::ArmModel m = cfg.arm;
    m.payload_mass = cfg.payload_mass;
    return m;
}

control::AdaptiveController build_controller(const ScenarioConfig& cfg, Eigen::Index n_joints) {
    neuro::PesConfig pes{cfg.learning_rate, true};
    if (cfg.ablation == Ablation::learning_rate_zero) pes = {0.0, false};
    auto ctrl = control::make_adaptive_controller(
        n_joints, cfg.controller.gains, cfg.ensemble, pes, cfg.controller.input_mode,
        control::InputNormalization::uniform(n_joints, cfg.controller.q_bound, cfg.controller.dq_bound),
        derive_seed(cfg.seed, Stream::ensemble));
    if (cfg.controller.anti_windup) ctrl.torque_limit = cfg.arm.max_torque;
    return ctrl;
}

}  // namespace

Scenario::Scenario(ScenarioConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))),
      model_(loaded_model(cfg_)),
      targets_(generate_targets(model_, cfg_.n_targets, derive_seed(cfg_.seed, Stream::targets),
                                cfg_.target_min_frac, cfg_.target_max_frac)),
      ctrl_(build_controller(cfg_, model_.n_joints())) {
    state_.q = targets_.front().q_target.array() + cfg_.init_offset;
    state_.dq = Eigen::VectorXd::Zero(model_.n_joints());
}

TrialRecord Scenario::run_one(Phase phase, std::size_t trial_index, const arm::Target& target) {
    try {
        auto out = run_trial(ctrl_, model_, state_, target, cfg_.step_limit, cfg_.tol_frac, observer_);
        state_ = std::move(out.state);
        last_target_ = target.index;
        out.record.phase = phase;
        out.record.trial_index = trial_index;
        out.record.target_index = target.index;
        return out.record;
    } catch (const SimulationDiverged& e) {
        throw TrialDiverged(std::string(e.what()) + " (" + std::string(to_string(phase)) + " trial " +
                                std::to_string(trial_index) + ", target " + std::to_string(target.index) +
                                ", step " + std::to_string(e.step()) + ")",
                            phase, trial_index, target.index, e.step());
    }
}

std::vector<TrialRecord> Scenario::run_training_phase(const RecordSink& sink) {
    std::vector<TrialRecord> records;
    if (cfg_.ablation == Ablation::no_training) return records;
    ctrl_.pes.enabled = cfg_.ablation != Ablation::learning_rate_zero;
    records.reserve(cfg_.training_cycles * targets_.size());
    for (std::size_t cycle = 0; cycle < cfg_.training_cycles; ++cycle) {
        for (const auto& target : targets_) {
            records.push_back(run_one(Phase::training, records.size() + 1, target));
            if (sink) sink(records.back());
        }
    }
    return records;
}

std::vector<TrialRecord> Scenario::run_evaluation_phase(const RecordSink& sink) {
    ctrl_.pes.enabled =
        cfg_.ablation == Ablation::full_learning || cfg_.ablation == Ablation::no_training;
    std::mt19937_64 rng(derive_seed(cfg_.seed, Stream::evaluation));
    std::uniform_int_distribution<std::size_t> pick(0, targets_.size() - 1);
    std::vector<TrialRecord> records;
    records.reserve(cfg_.eval_trials);
    for (std::size_t t = 0; t < cfg_.eval_trials; ++t) {
        std::size_t idx = pick(rng);
        while (targets_[idx].index == last_target_) idx = pick(rng);
        records.push_back(run_one(Phase::evaluation, t + 1, targets_[idx]));
        if (sink) sink(records.back());
    }
    return records;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RecordSink& sink) {
    Scenario scenario(cfg);
    ScenarioResult result;
    result.training = scenario.run_training_phase(sink);
    result.evaluation = scenario.run_evaluation_phase(sink);
    return result;
}

}  // namespace snnarm::harness
