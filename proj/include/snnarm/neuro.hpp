#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace snnarm::neuro {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct LifParams {
    double tau_rc = 0.020;   // s
    double tau_ref = 0.002;  // s
    double dt = 0.001;       // s

    void validate() const;
};

enum class NeuronMode { spiking, rate };

/// A population of LIF neurons read out through linear decoders.
///
/// Row i of `encoders` is the unit-norm preferred direction of neuron i.
/// `decoders` is n_neurons x dim_out and is the only part that learns.
struct Ensemble {
    MatrixXd encoders;
    VectorXd gains;
    VectorXd biases;
    MatrixXd decoders;
    LifParams lif;
    double tau_syn = 0.010;  // s, first-order lowpass on activity and output
    NeuronMode mode = NeuronMode::rate;

    Eigen::Index n_neurons() const { return encoders.rows(); }
    Eigen::Index dim_in() const { return encoders.cols(); }
    Eigen::Index dim_out() const { return decoders.cols(); }

    void validate() const;
};

struct EnsembleState {
    VectorXd voltages;              // normalized membrane potential in [0, 1]
    VectorXd refractory_remaining;  // s
    VectorXd filtered_activity;     // Hz
    VectorXd filtered_output;
};

struct PesConfig {
    double learning_rate = 0.0;
    bool enabled = true;
};

/// Population parameters drawn when building an ensemble.
struct EnsembleSpec {
    Eigen::Index n_neurons = 1000;
    Eigen::Index dim_in = 1;
    Eigen::Index dim_out = 1;
    LifParams lif;
    double tau_syn = 0.010;
    NeuronMode mode = NeuronMode::rate;
    double max_rate_low = 100.0;   // Hz
    double max_rate_high = 200.0;  // Hz
    double intercept_low = -1.0;
    double intercept_high = 1.0;
};

/// Steady-state firing rate (Hz) for a constant normalized input current.
double lif_rate(double current, const LifParams& lif);
VectorXd lif_rates(const VectorXd& currents, const LifParams& lif);

/// Input current that makes a neuron fire at `rate` Hz; inverse of lif_rate for rate > 0.
double lif_current_for_rate(double rate, const LifParams& lif);

/// Advances every neuron by one dt and returns 0/1 spike indicators.
///
/// Voltages are integrated exactly over the non-refractory part of the step
/// and spike times are interpolated inside the step, so long-run spike counts
/// track lif_rate without dt quantization.
VectorXd lif_step(EnsembleState& state, const VectorXd& currents, const LifParams& lif);

/// Builds an ensemble with random encoders, max rates and intercepts and zero decoders.
Ensemble make_ensemble(const EnsembleSpec& spec, std::uint64_t seed);

EnsembleState make_state(const Ensemble& ens);

/// Per-neuron currents gain_i * <encoder_i, x> + bias_i.
VectorXd encode(const Ensemble& ens, const VectorXd& x);

/// Rate-mode activity matrix, one row per evaluation point.
MatrixXd activities(const Ensemble& ens, const MatrixXd& eval_points);

/// Ridge least-squares decoders: minimizes |A d - T|^2 + (reg * max(A))^2 |d|^2.
/// `eval_points` is m x dim_in, `targets` is m x dim_out.
MatrixXd solve_decoders(const Ensemble& ens, const MatrixXd& eval_points, const MatrixXd& targets,
                        double reg = 0.1);

/// Encodes x, advances the neurons one dt and returns the filtered decoded output.
VectorXd step_ensemble(const Ensemble& ens, EnsembleState& state, const VectorXd& x);

/// PES update: d_i += (kappa * dt / n) * filtered_activity_i * error.
void apply_pes(Ensemble& ens, const EnsembleState& state, const VectorXd& error,
               const PesConfig& cfg);

}  // namespace snnarm::neuro
