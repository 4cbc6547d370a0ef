#include "snnarm/controller.hpp"

#include <algorithm>
#include <cmath>

#include "snnarm/errors.hpp"

namespace snnarm::control {

using detail::require;

void PdGains::validate() const {
    require(std::isfinite(kp) && kp > 0.0, "PdGains: kp must be positive");
    require(std::isfinite(kd) && kd >= 0.0, "PdGains: kd must be non-negative");
}

void PidGains::validate() const {
    require(std::isfinite(kp) && std::isfinite(ki) && std::isfinite(kd), "PidGains: gains must be finite");
    require(ki >= 0.0, "PidGains: ki must be non-negative");
}

VectorXd pd_torque(const PdGains& gains, const VectorXd& q, const VectorXd& dq,
                   const VectorXd& q_target) {
    require(q.size() == dq.size() && q.size() == q_target.size(), "pd_torque: dimension mismatch");
    return gains.kp * (q_target - q) - gains.kd * dq;
}

PidOutput pid_torque(const PidGains& gains, const VectorXd& q, const VectorXd& dq,
                     const VectorXd& q_target, const VectorXd& integral, double dt) {
    require(q.size() == dq.size() && q.size() == q_target.size() && q.size() == integral.size(),
            "pid_torque: dimension mismatch");
    require(dt > 0.0, "pid_torque: dt must be positive");
    const VectorXd err = q_target - q;
    PidOutput out;
    out.integral = integral + err * dt;
    out.torque = gains.kp * err + gains.ki * out.integral - gains.kd * dq;
    return out;
}

InputNormalization InputNormalization::uniform(Eigen::Index n_joints, double q_bound, double dq_bound) {
    InputNormalization norm;
    norm.q_low = VectorXd::Constant(n_joints, -q_bound);
    norm.q_high = VectorXd::Constant(n_joints, q_bound);
    norm.dq_low = VectorXd::Constant(n_joints, -dq_bound);
    norm.dq_high = VectorXd::Constant(n_joints, dq_bound);
    return norm;
}

void InputNormalization::validate(Eigen::Index n_joints) const {
    require(q_low.size() == n_joints && q_high.size() == n_joints && dq_low.size() == n_joints &&
                dq_high.size() == n_joints,
            "InputNormalization: bounds do not match joint count");
    require(((q_high - q_low).array() > 0.0).all() && ((dq_high - dq_low).array() > 0.0).all(),
            "InputNormalization: bounds need strictly positive width");
}

VectorXd normalize_input(InputNormalization& norm, const VectorXd& q, const VectorXd& dq) {
    const auto n = q.size();
    require(dq.size() == n, "normalize_input: dimension mismatch");
    norm.validate(n);
    VectorXd x(2 * n);
    auto map = [&](double v, double lo, double hi) {
        const double y = 2.0 * (v - lo) / (hi - lo) - 1.0;
        if (y > 1.0 || y < -1.0) {
            ++norm.saturations;
            return std::clamp(y, -1.0, 1.0);
        }
        return y;
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        x[i] = map(q[i], norm.q_low[i], norm.q_high[i]);
        x[n + i] = map(dq[i], norm.dq_low[i], norm.dq_high[i]);
    }
    return x;
}

void AdaptiveController::validate() const {
    gains.validate();
    ensemble.validate();
    const auto n = n_joints();
    require(ensemble.dim_in() == 2 * n, "AdaptiveController: ensemble input must be 2 * n_joints");
    require(pes.learning_rate >= 0.0, "AdaptiveController: learning rate must be non-negative");
    require(torque_limit > 0.0, "AdaptiveController: torque limit must be positive");
    norm.validate(n);
}

AdaptiveController make_adaptive_controller(Eigen::Index n_joints, const PdGains& gains,
                                            neuro::EnsembleSpec spec, const neuro::PesConfig& pes,
                                            InputMode mode, InputNormalization norm,
                                            std::uint64_t seed) {
    spec.dim_in = 2 * n_joints;
    spec.dim_out = n_joints;
    AdaptiveController ctrl;
    ctrl.gains = gains;
    ctrl.ensemble = neuro::make_ensemble(spec, seed);
    ctrl.ens_state = neuro::make_state(ctrl.ensemble);
    ctrl.pes = pes;
    ctrl.input_mode = mode;
    ctrl.norm = std::move(norm);
    ctrl.last_pd = VectorXd::Zero(n_joints);
    ctrl.last_adaptive = VectorXd::Zero(n_joints);
    ctrl.validate();
    return ctrl;
}

VectorXd adaptive_torque(AdaptiveController& ctrl, const VectorXd& q, const VectorXd& dq,
                         const VectorXd& q_target) {
    const auto n = ctrl.n_joints();
    require(q.size() == n && dq.size() == n && q_target.size() == n,
            "adaptive_torque: dimension mismatch");
    require(q.allFinite() && dq.allFinite() && q_target.allFinite(),
            "adaptive_torque: non-finite arm state");

    const VectorXd err = q_target - q;
    ctrl.last_pd = pd_torque(ctrl.gains, q, dq, q_target);

    VectorXd x;
    if (ctrl.input_mode == InputMode::state) {
        x = normalize_input(ctrl.norm, q, dq);
    } else {
        // error slot: same width as the angle bounds, centered on zero
        const VectorXd half = 0.5 * (ctrl.norm.q_high - ctrl.norm.q_low);
        InputNormalization centered = ctrl.norm;
        centered.q_low = -half;
        centered.q_high = half;
        x = normalize_input(centered, err, dq);
        ctrl.norm.saturations = centered.saturations;
    }

    ctrl.last_adaptive = neuro::step_ensemble(ctrl.ensemble, ctrl.ens_state, x);
    VectorXd total = ctrl.last_pd + ctrl.last_adaptive;
    if (ctrl.pes.enabled) {
        if ((total.array().abs() > ctrl.torque_limit).any())
            ++ctrl.learning_skipped;
        else
            neuro::apply_pes(ctrl.ensemble, ctrl.ens_state, err, ctrl.pes);
    }
    return total;
}

}  // namespace snnarm::control
