#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace snnarm::arm {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

/// Planar serial arm of revolute joints. Each link is a rod with its center
/// of mass at mid-length; the payload is a point mass at the end-effector.
/// Gravity acts along -y in the arm plane.
struct ArmModel {
    VectorXd link_lengths;    // m
    VectorXd link_masses;     // kg
    VectorXd link_inertias;   // kg m^2 about the link center
    double joint_friction = 0.5;  // N m s / rad, viscous, same for every joint
    double payload_mass = 0.0;    // kg
    double gravity = 9.81;        // m/s^2
    double max_torque = 100.0;    // N m
    double dt = 0.001;            // s

    Eigen::Index n_joints() const { return link_lengths.size(); }
    double reach() const { return link_lengths.sum(); }

    void validate() const;
};

/// The default 2-link desk-scale plant; rod inertias m l^2 / 12.
ArmModel default_model();

/// Builds a model with rod inertias m l^2 / 12 for the given links.
ArmModel rod_model(const VectorXd& lengths, const VectorXd& masses);

struct ArmState {
    VectorXd q;   // rad
    VectorXd dq;  // rad/s
};

struct Target {
    Vector2d position;  // m
    VectorXd q_target;  // rad
    std::size_t index = 0;  // 1-based ordinal within the scenario
};

inline constexpr double kClosedFormIkTol = 1e-6;
inline constexpr double kIterativeIkTol = 1e-4;
inline constexpr int kIkMaxIters = 200;

Vector2d forward_kinematics(const ArmModel& model, const VectorXd& q);

/// 2 x n positional Jacobian of the end-effector.
MatrixXd jacobian(const ArmModel& model, const VectorXd& q);

/// Joint angles placing the end-effector at `position`.
///
/// Two links use the closed form with the elbow-up branch (q2 <= 0). Other
/// chains run damped least squares from `seed` (zeros when empty).
/// Throws UnreachableTarget or ConvergenceError.
VectorXd inverse_kinematics(const ArmModel& model, const Vector2d& position,
                            const VectorXd& seed = VectorXd());

MatrixXd mass_matrix(const ArmModel& model, const VectorXd& q);

/// Christoffel-consistent Coriolis/centrifugal matrix C with C(q, dq) dq the velocity torques.
MatrixXd coriolis_matrix(const ArmModel& model, const VectorXd& q, const VectorXd& dq);
VectorXd coriolis(const ArmModel& model, const VectorXd& q, const VectorXd& dq);

VectorXd gravity_torque(const ArmModel& model, const VectorXd& q);

double potential_energy(const ArmModel& model, const VectorXd& q);
double kinetic_energy(const ArmModel& model, const ArmState& state);

VectorXd clamp_torque(const ArmModel& model, const VectorXd& torque);

/// One semi-implicit Euler step of M ddq = tau - C dq - g - b dq.
/// Throws SimulationDiverged if the new state is not finite.
ArmState dynamics_step(const ArmModel& model, const ArmState& state, const VectorXd& torque);

double distance_to(const ArmModel& model, const ArmState& state, const Target& target);

/// True iff the end-effector is within tol_frac * reach of the target (closed).
bool reached(const ArmModel& model, const ArmState& state, const Target& target, double tol_frac);

}  // namespace snnarm::arm
