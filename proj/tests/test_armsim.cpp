#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "snnarm/armsim.hpp"
#include "snnarm/errors.hpp"

using namespace snnarm;
using namespace snnarm::arm;

namespace {

ArmModel unit_two_link() {
    ArmModel m = rod_model(Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(1.0, 1.0));
    return m;
}

ArmModel three_link() { return rod_model(Eigen::Vector3d(0.8, 0.7, 0.5), Eigen::Vector3d(2.0, 1.5, 1.0)); }

// Textbook two-link terms with the payload folded into link 2's first moment.
struct TwoLinkOracle {
    const ArmModel& m;
    double lc1() const { return 0.5 * m.link_lengths[0]; }
    double lc2() const { return 0.5 * m.link_lengths[1]; }
    double l1() const { return m.link_lengths[0]; }
    double l2() const { return m.link_lengths[1]; }
    double m1() const { return m.link_masses[0]; }
    double m2() const { return m.link_masses[1]; }
    double mp() const { return m.payload_mass; }
    double moment2() const { return m2() * lc2() + mp() * l2(); }

    Eigen::Matrix2d mass(const Eigen::Vector2d& q) const {
        const double c2 = std::cos(q[1]);
        const double i1 = m.link_inertias[0], i2 = m.link_inertias[1];
        const double m22 = i2 + m2() * lc2() * lc2() + mp() * l2() * l2();
        const double m12 = m22 + l1() * moment2() * c2;
        const double m11 = i1 + m1() * lc1() * lc1() + (m2() + mp()) * l1() * l1() + m22 + 2.0 * l1() * moment2() * c2;
        Eigen::Matrix2d out;
        out << m11, m12, m12, m22;
        return out;
    }
    Eigen::Vector2d coriolis(const Eigen::Vector2d& q, const Eigen::Vector2d& dq) const {
        const double h = l1() * moment2() * std::sin(q[1]);
        return {-h * (2.0 * dq[0] * dq[1] + dq[1] * dq[1]), h * dq[0] * dq[0]};
    }
    Eigen::Vector2d gravity(const Eigen::Vector2d& q) const {
        const double g = m.gravity;
        const double c1 = std::cos(q[0]), c12 = std::cos(q[0] + q[1]);
        return {(m1() * lc1() + (m2() + mp()) * l1()) * g * c1 + moment2() * g * c12, moment2() * g * c12};
    }
};

VectorXd random_q(std::mt19937_64& rng, Eigen::Index n, double scale = M_PI) {
    std::uniform_real_distribution<double> u(-scale, scale);
    VectorXd q(n);
    for (auto& v : q) v = u(rng);
    return q;
}

}  // namespace

TEST_CASE("forward kinematics") {
    const ArmModel m = unit_two_link();
    CHECK((forward_kinematics(m, Eigen::Vector2d(0.0, 0.0)) - Vector2d(2.0, 0.0)).norm() < 1e-15);
    CHECK((forward_kinematics(m, Eigen::Vector2d(M_PI / 2, 0.0)) - Vector2d(0.0, 2.0)).norm() < 1e-15);
    CHECK((forward_kinematics(m, Eigen::Vector2d(M_PI / 2, -M_PI / 2)) - Vector2d(1.0, 1.0)).norm() < 1e-15);
    CHECK_THROWS_AS(forward_kinematics(m, Eigen::Vector3d::Zero()), ContractViolation);
}

TEST_CASE("jacobian matches finite differences of forward kinematics") {
    std::mt19937_64 rng(3);
    for (const ArmModel& m : {unit_two_link(), three_link()}) {
        const VectorXd q = random_q(rng, m.n_joints());
        const MatrixXd jac = jacobian(m, q);
        for (Eigen::Index j = 0; j < m.n_joints(); ++j) {
            VectorXd hi = q, lo = q;
            hi[j] += 1e-6;
            lo[j] -= 1e-6;
            const Vector2d fd = (forward_kinematics(m, hi) - forward_kinematics(m, lo)) / 2e-6;
            CHECK((fd - jac.col(j)).norm() < 1e-8);
        }
    }
}

TEST_CASE("closed-form inverse kinematics") {
    const ArmModel m = unit_two_link();
    const VectorXd ext = inverse_kinematics(m, Vector2d(2.0, 0.0));
    CHECK(ext[0] == doctest::Approx(0.0));
    CHECK(ext[1] == 0.0);
    const VectorXd up = inverse_kinematics(m, Vector2d(0.0, 2.0));
    CHECK(up[0] == doctest::Approx(M_PI / 2));
    CHECK(up[1] == 0.0);
    const VectorXd bent = inverse_kinematics(m, Vector2d(1.0, 1.0));
    CHECK(bent[0] == doctest::Approx(M_PI / 2));
    CHECK(bent[1] == doctest::Approx(-M_PI / 2));

    CHECK_THROWS_AS(inverse_kinematics(m, Vector2d(2.1, 0.0)), UnreachableTarget);
    const ArmModel uneven = rod_model(Eigen::Vector2d(1.0, 0.4), Eigen::Vector2d(1.0, 1.0));
    CHECK_THROWS_AS(inverse_kinematics(uneven, Vector2d(0.3, 0.0)), UnreachableTarget);
}

TEST_CASE("FK of IK round-trips on random reachable points, elbow-up") {
    const ArmModel m = default_model();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> radius(0.05, 1.999), angle(-M_PI, M_PI);
    for (int i = 0; i < 100; ++i) {
        const double r = radius(rng), a = angle(rng);
        const Vector2d p(r * std::cos(a), r * std::sin(a));
        const VectorXd q = inverse_kinematics(m, p);
        CHECK((forward_kinematics(m, q) - p).norm() < kClosedFormIkTol);
        CHECK(q[1] <= 0.0);
    }
}

TEST_CASE("damped least squares IK for three links") {
    const ArmModel m = three_link();
    std::mt19937_64 rng(12);
    for (int i = 0; i < 50; ++i) {
        const Vector2d p = forward_kinematics(m, random_q(rng, 3, 2.5));
        if (p.norm() < 0.2 || p.norm() > 1.95) continue;
        const VectorXd q = inverse_kinematics(m, p);
        CHECK((forward_kinematics(m, q) - p).norm() < kIterativeIkTol);
    }
    CHECK_THROWS_AS(inverse_kinematics(m, Vector2d(2.5, 0.0)), UnreachableTarget);
}

TEST_CASE("mass matrix, Coriolis and gravity agree with the textbook two-link terms") {
    std::mt19937_64 rng(13);
    for (double payload : {0.0, 1.0}) {
        ArmModel m = default_model();
        m.payload_mass = payload;
        const TwoLinkOracle oracle{m};
        for (int i = 0; i < 50; ++i) {
            const Eigen::Vector2d q = random_q(rng, 2), dq = random_q(rng, 2, 3.0);
            CHECK((mass_matrix(m, q) - oracle.mass(q)).norm() < 1e-12);
            CHECK((coriolis(m, q, dq) - oracle.coriolis(q, dq)).norm() < 1e-11);
            CHECK((gravity_torque(m, q) - oracle.gravity(q)).norm() < 1e-11);
        }
    }
}

TEST_CASE("payload adds a point-mass term at full extension") {
    ArmModel light = default_model();
    ArmModel loaded = light;
    loaded.payload_mass = 1.0;
    const VectorXd q = Eigen::Vector2d::Zero();
    const double diff = mass_matrix(loaded, q)(0, 0) - mass_matrix(light, q)(0, 0);
    CHECK(diff == doctest::Approx(1.0 * 2.0 * 2.0).epsilon(1e-14));
}

TEST_CASE("degenerate velocity and gravity terms vanish") {
    ArmModel m = three_link();
    std::mt19937_64 rng(14);
    const VectorXd q = random_q(rng, 3);
    CHECK(coriolis(m, q, VectorXd::Zero(3)).isZero(0.0));
    m.gravity = 0.0;
    CHECK(gravity_torque(m, q).isZero(0.0));
}

TEST_CASE("mass matrix is symmetric positive definite") {
    std::mt19937_64 rng(15);
    for (ArmModel m : {default_model(), three_link()}) {
        m.payload_mass = 1.0;
        for (int i = 0; i < 1000; ++i) {
            const MatrixXd mm = mass_matrix(m, random_q(rng, m.n_joints()));
            CHECK((mm - mm.transpose()).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(mm.llt().info() == Eigen::Success);
        }
    }
}

TEST_CASE("Mdot - 2C is skew-symmetric") {
    std::mt19937_64 rng(16);
    for (ArmModel m : {default_model(), three_link()}) {
        m.payload_mass = 1.0;
        const auto n = m.n_joints();
        for (int i = 0; i < 100; ++i) {
            const VectorXd q = random_q(rng, n), dq = random_q(rng, n, 3.0), v = random_q(rng, n, 1.0);
            const double h = 1e-5;
            const MatrixXd mdot = (mass_matrix(m, q + h * dq) - mass_matrix(m, q - h * dq)) / (2.0 * h);
            const MatrixXd n_mat = mdot - 2.0 * coriolis_matrix(m, q, dq);
            CHECK(std::abs(v.dot(n_mat * v)) < 1e-8);
        }
    }
}

TEST_CASE("gravity torque is the gradient of potential energy") {
    std::mt19937_64 rng(17);
    for (ArmModel m : {default_model(), three_link()}) {
        m.payload_mass = 0.7;
        const auto n = m.n_joints();
        for (int i = 0; i < 50; ++i) {
            const VectorXd q = random_q(rng, n);
            const VectorXd g = gravity_torque(m, q);
            for (Eigen::Index j = 0; j < n; ++j) {
                VectorXd hi = q, lo = q;
                hi[j] += 1e-6;
                lo[j] -= 1e-6;
                const double fd = (potential_energy(m, hi) - potential_energy(m, lo)) / 2e-6;
                CHECK(std::abs(fd - g[j]) <= 1e-6 * std::max(1.0, g.norm()));
            }
        }
    }
}

TEST_CASE("diagonal inertia never decreases with payload") {
    std::mt19937_64 rng(18);
    for (int i = 0; i < 100; ++i) {
        ArmModel m = three_link();
        const VectorXd q = random_q(rng, 3);
        VectorXd prev = mass_matrix(m, q).diagonal();
        for (double p = 0.25; p <= 3.0; p += 0.25) {
            m.payload_mass = p;
            const VectorXd d = mass_matrix(m, q).diagonal();
            CHECK(((d - prev).array() >= 0.0).all());
            prev = d;
        }
    }
}

TEST_CASE("gravity-compensating torque holds the arm still") {
    ArmModel m = default_model();
    m.payload_mass = 1.0;
    const ArmState s{Eigen::Vector2d(0.3, -0.9), Eigen::Vector2d::Zero()};
    const ArmState next = dynamics_step(m, s, gravity_torque(m, s.q));
    CHECK((next.q - s.q).norm() < 1e-12);
    CHECK(next.dq.norm() < 1e-12);
}

TEST_CASE("single link under constant torque accelerates linearly") {
    ArmModel m = rod_model(VectorXd::Constant(1, 0.8), VectorXd::Constant(1, 1.2));
    m.gravity = 0.0;
    m.joint_friction = 0.0;
    m.payload_mass = 0.5;
    const double inertia = 1.2 * 0.64 / 12.0 + 1.2 * 0.16 + 0.5 * 0.64;
    ArmState s{VectorXd::Zero(1), VectorXd::Zero(1)};
    const VectorXd tau = VectorXd::Constant(1, 2.5);
    const int n = 500;
    for (int i = 0; i < n; ++i) s = dynamics_step(m, s, tau);
    CHECK(s.dq[0] == doctest::Approx(2.5 / inertia * n * m.dt).epsilon(1e-12));
}

TEST_CASE("kinetic energy is conserved without gravity, friction or torque") {
    for (ArmModel m : {default_model(), three_link()}) {
        m.gravity = 0.0;
        m.joint_friction = 0.0;
        m.payload_mass = 1.0;
        const auto n = m.n_joints();
        ArmState s{VectorXd::Constant(n, 0.2), VectorXd::LinSpaced(n, 1.5, -1.0)};
        const double e0 = kinetic_energy(m, s);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            s = dynamics_step(m, s, VectorXd::Zero(n));
            worst = std::max(worst, std::abs(kinetic_energy(m, s) - e0) / e0);
        }
        CHECK(worst < 1e-2);
    }
}

TEST_CASE("dynamics_step reports divergence") {
    ArmModel m = default_model();
    const ArmState s{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(INFINITY, 0.0)};
    CHECK_THROWS_AS(dynamics_step(m, s, Eigen::Vector2d::Zero()), SimulationDiverged);
}

TEST_CASE("torque clamp") {
    const ArmModel m = default_model();
    const VectorXd t = clamp_torque(m, Eigen::Vector2d(250.0, -101.0));
    CHECK(t[0] == 100.0);
    CHECK(t[1] == -100.0);
}

TEST_CASE("reached uses a closed tolerance ball") {
    const ArmModel m = unit_two_link();
    const ArmState s{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
    // tip at (2, 0); tol_frac 0.25 of a 2 m reach is exactly 0.5 m
    const Target on_tip{Vector2d(2.0, 0.0), Eigen::Vector2d::Zero(), 1};
    CHECK(reached(m, s, on_tip, 0.015));
    const Target at_edge{Vector2d(2.5, 0.0), Eigen::Vector2d::Zero(), 1};
    CHECK(distance_to(m, s, at_edge) == 0.5);
    CHECK(reached(m, s, at_edge, 0.25));
    const Target beyond{Vector2d(2.505, 0.0), Eigen::Vector2d::Zero(), 1};
    CHECK_FALSE(reached(m, s, beyond, 0.25));
}

TEST_CASE("model validation") {
    ArmModel m = default_model();
    CHECK_NOTHROW(m.validate());
    m.link_masses[0] = 0.0;
    CHECK_THROWS_AS(m.validate(), ContractViolation);
}
