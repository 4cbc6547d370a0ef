#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>

#include "snnarm/neuro.hpp"

namespace snnarm::control {

using Eigen::VectorXd;

struct PdGains {
    double kp = 200.0;  // N m / rad
    double kd = 10.0;   // N m s / rad

    void validate() const;
};

struct PidGains {
    double kp = 200.0;
    double ki = 0.0;  // N m / (rad s)
    double kd = 10.0;

    void validate() const;
};

/// tau = kp (q_target - q) - kd dq
VectorXd pd_torque(const PdGains& gains, const VectorXd& q, const VectorXd& dq,
                   const VectorXd& q_target);

struct PidOutput {
    VectorXd torque;
    VectorXd integral;  // rad s
};

/// Classical PID; accumulates (q_target - q) dt into the returned integral state.
PidOutput pid_torque(const PidGains& gains, const VectorXd& q, const VectorXd& dq,
                     const VectorXd& q_target, const VectorXd& integral, double dt);

/// What the adaptive ensemble sees besides joint velocities.
enum class InputMode { state, error };

/// Per-joint affine bounds mapped onto [-1, 1]. In error mode the position
/// slot carries q_target - q, mapped with the same width centered on zero.
struct InputNormalization {
    VectorXd q_low, q_high;    // rad
    VectorXd dq_low, dq_high;  // rad/s
    std::size_t saturations = 0;

    static InputNormalization uniform(Eigen::Index n_joints, double q_bound, double dq_bound);
    void validate(Eigen::Index n_joints) const;
};

/// Maps (q, dq) component-wise onto [-1, 1], clamping and counting saturated components.
VectorXd normalize_input(InputNormalization& norm, const VectorXd& q, const VectorXd& dq);

/// PD controller whose integral branch is a PES-trained neuron ensemble
/// (dim_in = 2 n_joints, dim_out = n_joints).
struct AdaptiveController {
    PdGains gains;
    neuro::Ensemble ensemble;
    neuro::EnsembleState ens_state;
    neuro::PesConfig pes;
    InputMode input_mode = InputMode::state;
    InputNormalization norm;
    // PES is skipped on steps where any component of the summed torque exceeds this
    double torque_limit = std::numeric_limits<double>::infinity();  // N m
    VectorXd last_pd;
    VectorXd last_adaptive;
    std::size_t learning_skipped = 0;

    Eigen::Index n_joints() const { return ensemble.dim_out(); }
    void validate() const;
};

AdaptiveController make_adaptive_controller(Eigen::Index n_joints, const PdGains& gains,
                                            neuro::EnsembleSpec spec, const neuro::PesConfig& pes,
                                            InputMode mode, InputNormalization norm,
                                            std::uint64_t seed);

/// PD torque plus the decoded ensemble output. When learning is enabled the
/// decoders are then trained with the joint position error q_target - q,
/// unless the summed torque exceeds torque_limit. The result is not clamped.
VectorXd adaptive_torque(AdaptiveController& ctrl, const VectorXd& q, const VectorXd& dq,
                         const VectorXd& q_target);

}  // namespace snnarm::control
