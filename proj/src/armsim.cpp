#include "snnarm/armsim.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "snnarm/errors.hpp"

namespace snnarm::arm {

using detail::require;

namespace {

struct PointMass {
    double mass;
    Eigen::Index link;
    double offset;  // distance from the link's proximal joint
};

std::vector<PointMass> point_masses(const ArmModel& model) {
    std::vector<PointMass> pts;
    const auto n = model.n_joints();
    pts.reserve(static_cast<std::size_t>(n) + 1);
    for (Eigen::Index i = 0; i < n; ++i)
        pts.push_back({model.link_masses[i], i, 0.5 * model.link_lengths[i]});
    if (model.payload_mass > 0.0) pts.push_back({model.payload_mass, n - 1, model.link_lengths[n - 1]});
    return pts;
}

VectorXd absolute_angles(const VectorXd& q) {
    VectorXd theta(q.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) theta[i] = acc += q[i];
    return theta;
}

/// Column k of the returned 2 x (link+1) matrix is sum_{m=k}^{link} L_m u(theta_m),
/// with L_m the link length, or the point's offset on its own link.
Eigen::Matrix2Xd tail_sums(const ArmModel& model, const VectorXd& theta, const PointMass& p) {
    Eigen::Matrix2Xd s(2, p.link + 1);
    Vector2d acc = Vector2d::Zero();
    for (Eigen::Index k = p.link; k >= 0; --k) {
        const double len = k == p.link ? p.offset : model.link_lengths[k];
        acc += len * Vector2d(std::cos(theta[k]), std::sin(theta[k]));
        s.col(k) = acc;
    }
    return s;
}

Vector2d perp(const Vector2d& v) { return {-v.y(), v.x()}; }

/// Positional Jacobian of a point mass: column j is perp(tail_sum(j)) for j <= link.
MatrixXd point_jacobian(const Eigen::Matrix2Xd& tails, Eigen::Index n) {
    MatrixXd jac = MatrixXd::Zero(2, n);
    for (Eigen::Index j = 0; j < tails.cols(); ++j) jac.col(j) = perp(tails.col(j));
    return jac;
}

void require_joints(const ArmModel& model, const VectorXd& v, const char* msg) {
    require(v.size() == model.n_joints(), msg);
}

/// dM/dq_l for every l.
std::vector<MatrixXd> mass_matrix_derivatives(const ArmModel& model, const VectorXd& q) {
    const auto n = model.n_joints();
    const VectorXd theta = absolute_angles(q);
    std::vector<MatrixXd> dm(static_cast<std::size_t>(n), MatrixXd::Zero(n, n));
    for (const auto& p : point_masses(model)) {
        const auto tails = tail_sums(model, theta, p);
        const MatrixXd jac = point_jacobian(tails, n);
        // d(J_j)/dq_l = -tail_sum(max(j, l))
        auto hess = [&](Eigen::Index j, Eigen::Index l) -> Vector2d {
            const auto k = std::max(j, l);
            if (k > p.link) return Vector2d::Zero();
            return -tails.col(k);
        };
        for (Eigen::Index l = 0; l < n; ++l)
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index k = 0; k < n; ++k)
                    dm[static_cast<std::size_t>(l)](j, k) +=
                        p.mass * (hess(j, l).dot(jac.col(k)) + jac.col(j).dot(hess(k, l)));
    }
    return dm;
}

}  // namespace

void ArmModel::validate() const {
    const auto n = n_joints();
    require(n >= 1, "ArmModel: needs at least one link");
    require(link_masses.size() == n && link_inertias.size() == n,
            "ArmModel: link arrays disagree on joint count");
    require((link_lengths.array() > 0.0).all(), "ArmModel: link lengths must be positive");
    require((link_masses.array() > 0.0).all(), "ArmModel: link masses must be positive");
    require((link_inertias.array() >= 0.0).all(), "ArmModel: link inertias must be non-negative");
    require(joint_friction >= 0.0, "ArmModel: friction must be non-negative");
    require(payload_mass >= 0.0, "ArmModel: payload must be non-negative");
    require(std::isfinite(gravity), "ArmModel: gravity must be finite");
    require(max_torque > 0.0, "ArmModel: max_torque must be positive");
    require(dt > 0.0, "ArmModel: dt must be positive");
}

ArmModel rod_model(const VectorXd& lengths, const VectorXd& masses) {
    ArmModel m;
    m.link_lengths = lengths;
    m.link_masses = masses;
    m.link_inertias = (masses.array() * lengths.array().square() / 12.0).matrix();
    return m;
}

ArmModel default_model() {
    return rod_model(Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(2.0, 1.5));
}

Vector2d forward_kinematics(const ArmModel& model, const VectorXd& q) {
    require_joints(model, q, "forward_kinematics: q has wrong length");
    Vector2d p = Vector2d::Zero();
    double theta = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        theta += q[i];
        p += model.link_lengths[i] * Vector2d(std::cos(theta), std::sin(theta));
    }
    return p;
}

MatrixXd jacobian(const ArmModel& model, const VectorXd& q) {
    require_joints(model, q, "jacobian: q has wrong length");
    const auto n = model.n_joints();
    const PointMass tip{0.0, n - 1, model.link_lengths[n - 1]};
    return point_jacobian(tail_sums(model, absolute_angles(q), tip), n);
}

VectorXd inverse_kinematics(const ArmModel& model, const Vector2d& position, const VectorXd& seed) {
    const auto n = model.n_joints();
    const double r = position.norm();
    const double outer = model.reach();
    const double inner = std::max(0.0, 2.0 * model.link_lengths.maxCoeff() - outer);
    constexpr double slack = 1e-9;
    if (!position.allFinite() || r > outer + slack || r < inner - slack)
        throw UnreachableTarget("inverse_kinematics: position outside the reachable annulus");

    if (n == 1) {
        VectorXd q(1);
        q[0] = std::atan2(position.y(), position.x());
        if ((forward_kinematics(model, q) - position).norm() > kClosedFormIkTol)
            throw UnreachableTarget("inverse_kinematics: position not on the single link's circle");
        return q;
    }

    if (n == 2) {
        const double l1 = model.link_lengths[0];
        const double l2 = model.link_lengths[1];
        const double c2 = std::clamp((r * r - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
        VectorXd q(2);
        q[1] = -std::acos(c2);
        q[0] = std::atan2(position.y(), position.x()) -
               std::atan2(l2 * std::sin(q[1]), l1 + l2 * std::cos(q[1]));
        q[0] = std::remainder(q[0], 2.0 * M_PI);
        q[1] = q[1] == 0.0 ? 0.0 : q[1];  // no -0.0 at full extension
        if ((forward_kinematics(model, q) - position).norm() > kClosedFormIkTol)
            throw ConvergenceError("inverse_kinematics: closed form missed tolerance");
        return q;
    }

    VectorXd q = seed;
    if (q.size() != n) {
        q = VectorXd::Constant(n, -0.4);
        q[0] = std::atan2(position.y(), position.x());
    }
    constexpr double damping = 0.05;
    for (int it = 0; it < kIkMaxIters; ++it) {
        const Vector2d err = position - forward_kinematics(model, q);
        if (err.norm() < 0.1 * kIterativeIkTol) break;
        const MatrixXd jac = jacobian(model, q);
        const Eigen::Matrix2d jjt = jac * jac.transpose() + damping * damping * Eigen::Matrix2d::Identity();
        q += jac.transpose() * jjt.ldlt().solve(err);
    }
    if ((forward_kinematics(model, q) - position).norm() > kIterativeIkTol)
        throw ConvergenceError("inverse_kinematics: damped least squares did not converge");
    for (Eigen::Index i = 0; i < n; ++i) q[i] = std::remainder(q[i], 2.0 * M_PI);
    return q;
}

MatrixXd mass_matrix(const ArmModel& model, const VectorXd& q) {
    require_joints(model, q, "mass_matrix: q has wrong length");
    const auto n = model.n_joints();
    const VectorXd theta = absolute_angles(q);
    MatrixXd m = MatrixXd::Zero(n, n);
    for (const auto& p : point_masses(model)) {
        const MatrixXd jac = point_jacobian(tail_sums(model, theta, p), n);
        m.noalias() += p.mass * jac.transpose() * jac;
    }
    // link i spins at sum_{k<=i} dq_k
    for (Eigen::Index i = 0; i < n; ++i) m.topLeftCorner(i + 1, i + 1).array() += model.link_inertias[i];
    return m;
}

MatrixXd coriolis_matrix(const ArmModel& model, const VectorXd& q, const VectorXd& dq) {
    require_joints(model, q, "coriolis_matrix: q has wrong length");
    require_joints(model, dq, "coriolis_matrix: dq has wrong length");
    const auto n = model.n_joints();
    const auto dm = mass_matrix_derivatives(model, q);
    auto at = [&](Eigen::Index l) -> const MatrixXd& { return dm[static_cast<std::size_t>(l)]; };
    MatrixXd c = MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                c(i, j) += 0.5 * (at(k)(i, j) + at(j)(i, k) - at(i)(j, k)) * dq[k];
    return c;
}

VectorXd coriolis(const ArmModel& model, const VectorXd& q, const VectorXd& dq) {
    return coriolis_matrix(model, q, dq) * dq;
}

VectorXd gravity_torque(const ArmModel& model, const VectorXd& q) {
    require_joints(model, q, "gravity_torque: q has wrong length");
    const auto n = model.n_joints();
    const VectorXd theta = absolute_angles(q);
    VectorXd g = VectorXd::Zero(n);
    for (const auto& p : point_masses(model)) {
        const MatrixXd jac = point_jacobian(tail_sums(model, theta, p), n);
        g.noalias() += p.mass * model.gravity * jac.row(1).transpose();
    }
    return g;
}

double potential_energy(const ArmModel& model, const VectorXd& q) {
    require_joints(model, q, "potential_energy: q has wrong length");
    const VectorXd theta = absolute_angles(q);
    double v = 0.0;
    for (const auto& p : point_masses(model)) v += p.mass * model.gravity * tail_sums(model, theta, p)(1, 0);
    return v;
}

double kinetic_energy(const ArmModel& model, const ArmState& state) {
    return 0.5 * state.dq.dot(mass_matrix(model, state.q) * state.dq);
}

VectorXd clamp_torque(const ArmModel& model, const VectorXd& torque) {
    return torque.cwiseMax(-model.max_torque).cwiseMin(model.max_torque);
}

ArmState dynamics_step(const ArmModel& model, const ArmState& state, const VectorXd& torque) {
    require_joints(model, state.q, "dynamics_step: q has wrong length");
    require_joints(model, state.dq, "dynamics_step: dq has wrong length");
    require_joints(model, torque, "dynamics_step: torque has wrong length");
    const MatrixXd m = mass_matrix(model, state.q);
    const VectorXd rhs = torque - coriolis(model, state.q, state.dq) - gravity_torque(model, state.q) -
                         model.joint_friction * state.dq;
    const VectorXd ddq = m.llt().solve(rhs);
    ArmState next;
    next.dq = state.dq + ddq * model.dt;
    next.q = state.q + next.dq * model.dt;
    if (!next.q.allFinite() || !next.dq.allFinite())
        throw SimulationDiverged("dynamics_step: state became non-finite", 0);
    return next;
}

double distance_to(const ArmModel& model, const ArmState& state, const Target& target) {
    return (forward_kinematics(model, state.q) - target.position).norm();
}

bool reached(const ArmModel& model, const ArmState& state, const Target& target, double tol_frac) {
    return distance_to(model, state, target) <= tol_frac * model.reach();
}

}  // namespace snnarm::arm
