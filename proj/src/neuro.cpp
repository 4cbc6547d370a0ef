#include "snnarm/neuro.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "snnarm/errors.hpp"

namespace snnarm::neuro {

using detail::require;

void LifParams::validate() const {
    require(tau_rc > 0.0, "LifParams: tau_rc must be positive");
    require(tau_ref >= 0.0, "LifParams: tau_ref must be non-negative");
    require(dt > 0.0, "LifParams: dt must be positive");
    require(dt < tau_rc, "LifParams: dt must be smaller than tau_rc");
}

void Ensemble::validate() const {
    lif.validate();
    const auto n = n_neurons();
    require(n >= 1, "Ensemble: needs at least one neuron");
    require(gains.size() == n && biases.size() == n && decoders.rows() == n,
            "Ensemble: per-neuron arrays disagree on neuron count");
    require(tau_syn >= 0.0, "Ensemble: tau_syn must be non-negative");
    for (Eigen::Index i = 0; i < n; ++i) {
        require(std::abs(encoders.row(i).norm() - 1.0) < 1e-9, "Ensemble: encoders must be unit norm");
        require(gains[i] > 0.0, "Ensemble: gains must be positive");
    }
    require(decoders.allFinite(), "Ensemble: decoders must be finite");
}

double lif_rate(double current, const LifParams& lif) {
    if (current <= 1.0) return 0.0;
    return 1.0 / (lif.tau_ref - lif.tau_rc * std::log1p(-1.0 / current));
}

VectorXd lif_rates(const VectorXd& currents, const LifParams& lif) {
    VectorXd out(currents.size());
    for (Eigen::Index i = 0; i < currents.size(); ++i) out[i] = lif_rate(currents[i], lif);
    return out;
}

double lif_current_for_rate(double rate, const LifParams& lif) {
    require(rate > 0.0 && 1.0 / rate > lif.tau_ref, "lif_current_for_rate: rate not attainable");
    return -1.0 / std::expm1((lif.tau_ref - 1.0 / rate) / lif.tau_rc);
}

VectorXd lif_step(EnsembleState& state, const VectorXd& currents, const LifParams& lif) {
    const auto n = state.voltages.size();
    require(currents.size() == n && state.refractory_remaining.size() == n,
            "lif_step: current vector does not match ensemble state");
    VectorXd spikes = VectorXd::Zero(n);
    const double dt = lif.dt;
    for (Eigen::Index i = 0; i < n; ++i) {
        double& v = state.voltages[i];
        double& ref = state.refractory_remaining[i];
        const double j = currents[i];
        const double active = std::clamp(dt - ref, 0.0, dt);
        ref = std::max(ref - dt, 0.0);
        v -= (j - v) * std::expm1(-active / lif.tau_rc);
        if (v > 1.0) {
            spikes[i] = 1.0;
            // time between the threshold crossing and the end of this step
            const double since_spike = -lif.tau_rc * std::log1p(-(v - 1.0) / (j - 1.0));
            v = 0.0;
            ref = std::max(lif.tau_ref - since_spike, 0.0);
        } else if (v < 0.0) {
            v = 0.0;
        }
    }
    return spikes;
}

Ensemble make_ensemble(const EnsembleSpec& spec, std::uint64_t seed) {
    require(spec.n_neurons >= 1, "make_ensemble: n_neurons must be >= 1");
    require(spec.dim_in >= 1 && spec.dim_out >= 1, "make_ensemble: dimensions must be >= 1");
    require(spec.max_rate_low > 0.0 && spec.max_rate_low <= spec.max_rate_high,
            "make_ensemble: bad max rate range");
    require(spec.intercept_low >= -1.0 && spec.intercept_low <= spec.intercept_high &&
                spec.intercept_high <= 1.0,
            "make_ensemble: intercepts must lie in [-1, 1]");
    spec.lif.validate();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> rate_dist(spec.max_rate_low, spec.max_rate_high);
    std::uniform_real_distribution<double> icpt_dist(spec.intercept_low, spec.intercept_high);

    Ensemble ens;
    ens.lif = spec.lif;
    ens.tau_syn = spec.tau_syn;
    ens.mode = spec.mode;
    ens.encoders.resize(spec.n_neurons, spec.dim_in);
    ens.gains.resize(spec.n_neurons);
    ens.biases.resize(spec.n_neurons);
    ens.decoders = MatrixXd::Zero(spec.n_neurons, spec.dim_out);

    for (Eigen::Index i = 0; i < spec.n_neurons; ++i) {
        double norm = 0.0;
        do {
            for (Eigen::Index d = 0; d < spec.dim_in; ++d) ens.encoders(i, d) = normal(rng);
            norm = ens.encoders.row(i).norm();
        } while (norm < 1e-12);
        ens.encoders.row(i) /= norm;
    }
    for (Eigen::Index i = 0; i < spec.n_neurons; ++i) {
        const double max_rate = rate_dist(rng);
        // keep the intercept strictly below 1 so the gain stays finite
        const double intercept = std::min(icpt_dist(rng), 1.0 - 1e-6);
        const double j_max = lif_current_for_rate(max_rate, spec.lif);
        // j(intercept) = 1 and j(1) = j_max
        ens.gains[i] = (j_max - 1.0) / (1.0 - intercept);
        ens.biases[i] = 1.0 - ens.gains[i] * intercept;
    }
    return ens;
}

EnsembleState make_state(const Ensemble& ens) {
    const auto n = ens.n_neurons();
    return EnsembleState{VectorXd::Zero(n), VectorXd::Zero(n), VectorXd::Zero(n),
                         VectorXd::Zero(ens.dim_out())};
}

VectorXd encode(const Ensemble& ens, const VectorXd& x) {
    require(x.size() == ens.dim_in(), "encode: input dimension mismatch");
    return (ens.gains.array() * (ens.encoders * x).array() + ens.biases.array()).matrix();
}

MatrixXd activities(const Ensemble& ens, const MatrixXd& eval_points) {
    require(eval_points.cols() == ens.dim_in(), "activities: eval point dimension mismatch");
    MatrixXd a(eval_points.rows(), ens.n_neurons());
    for (Eigen::Index p = 0; p < eval_points.rows(); ++p)
        a.row(p) = lif_rates(encode(ens, eval_points.row(p).transpose()), ens.lif).transpose();
    return a;
}

MatrixXd solve_decoders(const Ensemble& ens, const MatrixXd& eval_points, const MatrixXd& targets,
                        double reg) {
    require(eval_points.rows() >= 1, "solve_decoders: no evaluation points");
    require(targets.rows() == eval_points.rows(), "solve_decoders: targets do not align with points");
    require(reg >= 0.0, "solve_decoders: reg must be non-negative");

    const MatrixXd a = activities(ens, eval_points);
    const double sigma = reg * a.maxCoeff();
    MatrixXd gram = a.transpose() * a;
    gram.diagonal().array() += sigma * sigma;
    const MatrixXd rhs = a.transpose() * targets;

    if (sigma > 0.0) {
        Eigen::LLT<MatrixXd> llt(gram);
        if (llt.info() != Eigen::Success) throw NumericalFailure("solve_decoders: Cholesky failed");
        return llt.solve(rhs);
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(gram);
    if (qr.rank() < gram.rows())
        throw NumericalFailure("solve_decoders: activity matrix is singular and reg = 0");
    return qr.solve(rhs);
}

VectorXd step_ensemble(const Ensemble& ens, EnsembleState& state, const VectorXd& x) {
    require(state.filtered_activity.size() == ens.n_neurons() &&
                state.filtered_output.size() == ens.dim_out(),
            "step_ensemble: state was not initialized for this ensemble");
    const VectorXd currents = encode(ens, x);
    const double alpha = ens.tau_syn > 0.0 ? -std::expm1(-ens.lif.dt / ens.tau_syn) : 1.0;
    if (ens.mode == NeuronMode::spiking) {
        const VectorXd spikes = lif_step(state, currents, ens.lif);
        state.filtered_activity += alpha * (spikes / ens.lif.dt - state.filtered_activity);
    } else {
        state.filtered_activity += alpha * (lif_rates(currents, ens.lif) - state.filtered_activity);
    }
    state.filtered_output.noalias() = ens.decoders.transpose() * state.filtered_activity;
    return state.filtered_output;
}

void apply_pes(Ensemble& ens, const EnsembleState& state, const VectorXd& error,
               const PesConfig& cfg) {
    require(error.size() == ens.dim_out(), "apply_pes: error dimension mismatch");
    require(error.allFinite(), "apply_pes: error vector is not finite");
    require(cfg.learning_rate >= 0.0, "apply_pes: learning rate must be non-negative");
    if (!cfg.enabled) return;
    const double scale = cfg.learning_rate * ens.lif.dt / static_cast<double>(ens.n_neurons());
    ens.decoders.noalias() += (scale * state.filtered_activity) * error.transpose();
}

}  // namespace snnarm::neuro
