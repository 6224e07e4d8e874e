#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "oactl/config.hpp"
#include "oactl/model.hpp"
#include "oactl_oracles/oracles.hpp"

using namespace oactl;

namespace {

const MultirotorConfig& hexa() {
  static const MultirotorConfig c = default_config().vehicle;
  return c;
}

Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

MultirotorConfig single_motor(const Vec3& d, int spin) {
  MultirotorConfig c = hexa();
  c.motors.resize(1);
  c.motors[0].position = d;
  c.motors[0].spin = spin;
  return c;
}

}  // namespace

TEST(Skew, ZeroVectorGivesZeroMatrix) { EXPECT_TRUE(skew(Vec3::Zero()).isZero(0.0)); }

TEST(Skew, BasisCrossProduct) {
  EXPECT_TRUE((skew(Vec3::UnitX()) * Vec3::UnitY()).isApprox(Vec3::UnitZ()));
}

TEST(Skew, MatchesCrossProduct) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const Vec3 v = random_vec(rng, 5), w = random_vec(rng, 5);
    const Vec3 c(v.y() * w.z() - v.z() * w.y(), v.z() * w.x() - v.x() * w.z(), v.x() * w.y() - v.y() * w.x());
    EXPECT_LE((skew(v) * w - c).norm(), 1e-12);
  }
}

TEST(EulerToRotation, ZeroIsIdentity) { EXPECT_TRUE(euler_to_rotation(Vec3::Zero()).isIdentity(0.0)); }

TEST(EulerToRotation, QuarterRollSendsYToZ) {
  const Vec3 r = euler_to_rotation(Vec3(M_PI / 2, 0, 0)) * Vec3::UnitY();
  EXPECT_LE((r - Vec3::UnitZ()).norm(), 1e-12);
}

TEST(EulerToRotation, Orthonormal) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 100; ++k) {
    const Mat3 r = euler_to_rotation(random_vec(rng, 3));
    EXPECT_LE((r.transpose() * r - Mat3::Identity()).norm(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
}

TEST(EulerToRotation, ComposesRollPitchYawInOrder) {
  const double a = 0.3, b = -0.4, c = 0.5;
  Mat3 rx, ry, rz;
  rx << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  ry << std::cos(b), 0, std::sin(b), 0, 1, 0, -std::sin(b), 0, std::cos(b);
  rz << std::cos(c), -std::sin(c), 0, std::sin(c), std::cos(c), 0, 0, 0, 1;
  EXPECT_LE((euler_to_rotation(Vec3(a, b, c)) - rx * ry * rz).norm(), 1e-14);
}

TEST(RotationToEuler, Identity) { EXPECT_LE(rotation_to_euler(Mat3::Identity()).norm(), 1e-15); }

TEST(RotationToEuler, SingleAxisRoll) {
  EXPECT_LE((rotation_to_euler(euler_to_rotation(Vec3(0.3, 0, 0))) - Vec3(0.3, 0, 0)).norm(), 1e-12);
}

TEST(RotationToEuler, RoundTripAwayFromGimbalLock) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> roll(-M_PI, M_PI), pitch(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const Mat3 r = euler_to_rotation(Vec3(roll(rng), pitch(rng), roll(rng)));
    EXPECT_LE((euler_to_rotation(rotation_to_euler(r)) - r).norm(), 1e-9);
  }
}

TEST(RotationToEuler, FlagsGimbalLockAndZeroesRoll) {
  const auto e = rotation_to_euler_checked(euler_to_rotation(Vec3(0.4, M_PI / 2, 0.2)));
  EXPECT_TRUE(e.gimbal_lock);
  EXPECT_EQ(e.euler.x(), 0.0);
}

TEST(MotorRotation, ZeroTiltThrustsUp) {
  EXPECT_LE((thrust_direction(0, 0, 0) - Vec3(0, 0, -1)).norm(), 1e-15);
}

TEST(MotorRotation, PitchTiltDirection) {
  const double b = 0.3;
  EXPECT_LE((thrust_direction(0, b, 0) - Vec3(-std::sin(b), 0, -std::cos(b))).norm(), 1e-15);
}

TEST(MotorRotation, PreservesNorm) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const Vec3 l = random_vec(rng, 1.5);
    EXPECT_NEAR((motor_rotation(l.x(), l.y(), l.z()) * Vec3::UnitZ()).norm(), 1.0, 1e-12);
  }
}

TEST(MotorThrustTorque, ZeroSpeed) {
  const auto o = motor_thrust_torque(0.0, hexa(), 0);
  EXPECT_EQ(o.thrust, 0.0);
  EXPECT_EQ(o.torque, 0.0);
}

TEST(MotorThrustTorque, FullSpeedThrust) {
  EXPECT_NEAR(motor_thrust_torque(209.4395, hexa(), 0).thrust, 5.0006, 1e-4);
}

TEST(MotorThrustTorque, NegativeSpinDragTorque) {
  ASSERT_EQ(hexa().motors[1].spin, -1);
  EXPECT_NEAR(motor_thrust_torque(100.0, hexa(), 1).torque, -0.0114, 1e-12);
}

TEST(MotorThrustTorque, RejectsNegativeSpeed) {
  EXPECT_THROW(motor_thrust_torque(-1.0, hexa(), 0), std::invalid_argument);
}

TEST(AllocationMatrices, SingleMotorWrench) {
  const auto c = single_motor(Vec3(0.15, 0, 0), 1);
  const auto b = allocation_matrices(c);
  const Vec3 u(0, 0, -1);
  EXPECT_LE((b.force * u - Vec3(0, 0, -1)).norm(), 1e-15);
  EXPECT_LE((b.torque * u - Vec3(0, 0.15, -0.01)).norm(), 1e-15);
}

TEST(AllocationMatrices, ZeroInputZeroWrench) {
  const auto b = allocation_matrices(hexa());
  EXPECT_TRUE((b.stacked() * Eigen::VectorXd::Zero(18)).isZero(0.0));
}

TEST(AllocationMatrices, SymmetricHoverCancelsTorque) {
  const auto b = allocation_matrices(hexa());
  Eigen::VectorXd u(18);
  for (int i = 0; i < 6; ++i) u.segment<3>(3 * i) = Vec3(0, 0, -1.2);
  EXPECT_LE((b.torque * u).norm(), 1e-14);
  for (int i = 0; i < 6; ++i) EXPECT_TRUE((b.force.block<3, 3>(0, 3 * i).isIdentity(0.0)));
}

TEST(ExtendedAllocation, Shape) {
  const auto bp = extended_allocation_matrix(hexa(), hover_actuators(hexa()));
  EXPECT_EQ(bp.rows(), 6);
  EXPECT_EQ(bp.cols(), 18);
}

TEST(ExtendedAllocation, ZeroTiltIsAllocationTimesBaseRotation) {
  const auto& c = hexa();
  const auto bp = extended_allocation_matrix(c, hover_actuators(c));
  const Eigen::MatrixXd b = allocation_matrices(c).stacked();
  const Mat3 r0 = motor_rotation(0, 0, 0);
  for (int i = 0; i < 6; ++i) EXPECT_LE((bp.middleCols<3>(3 * i) - b.middleCols<3>(3 * i) * r0).norm(), 1e-15);
}

TEST(ExtendedAllocation, MatchesTotalWrenchAndBodyForces) {
  std::mt19937_64 rng(5);
  const auto& c = hexa();
  for (int k = 0; k < 200; ++k) {
    const ActuatorState a = oracles::random_actuator_state(c, rng);
    const Vec6 nu = extended_allocation_matrix(c, a) * motor_force_vector(c, a);
    EXPECT_LE((nu - total_wrench(c, a).stacked()).norm(), 1e-10);
    Eigen::VectorXd u(18);
    for (int i = 0; i < 6; ++i) {
      u.segment<3>(3 * i) = c.k_t * a.motors[i].omega * a.motors[i].omega *
                            thrust_direction(a.motors[i].alpha, a.motors[i].beta, a.motors[i].gamma);
    }
    EXPECT_LE((allocation_matrices(c).stacked() * u - nu).norm(), 1e-10);
  }
}

TEST(TotalWrench, ZeroSpeedsZeroWrench) {
  ActuatorState a = hover_actuators(hexa());
  for (auto& m : a.motors) m.omega = 0.0;
  EXPECT_TRUE(total_wrench(hexa(), a).stacked().isZero(0.0));
}

TEST(TotalWrench, Hover) {
  const ActuatorState a = hover_actuators(hexa());
  EXPECT_NEAR(a.motors[0].omega, 97.7, 0.05);
  const Wrench w = total_wrench(hexa(), a);
  EXPECT_LE((w.force - Vec3(0, 0, -6.5295)).norm(), 1e-4);
  EXPECT_LE(w.torque.norm(), 1e-12);
}

TEST(TotalWrench, TiltedMotorLateralForce) {
  ActuatorState a = hover_actuators(hexa());
  for (auto& m : a.motors) m.omega = 0.0;
  a.motors[0].omega = 150.0;
  a.motors[0].beta = 40.0 * M_PI / 180.0;
  const double f = hexa().k_t * 150.0 * 150.0;
  EXPECT_NEAR(total_wrench(hexa(), a).force.head<2>().norm(), f * std::sin(40.0 * M_PI / 180.0), 1e-12);
}

TEST(TotalWrench, QuadraticInSpeed) {
  std::mt19937_64 rng(6);
  const ActuatorState a = oracles::random_actuator_state(hexa(), rng);
  ActuatorState b = a;
  for (auto& m : b.motors) m.omega *= 0.7;
  EXPECT_LE((total_wrench(hexa(), b).stacked() - 0.49 * total_wrench(hexa(), a).stacked()).norm(), 1e-12);
}

TEST(Dynamics, HoverEquilibrium) {
  const auto& c = hexa();
  const auto d = dynamics_derivative(RigidBodyState{}, total_wrench(c, hover_actuators(c)), {}, c);
  EXPECT_LE(d.velocity_dot.norm(), 1e-4);
  EXPECT_LE(d.body_rate_dot.norm(), 1e-12);
}

TEST(Dynamics, FreeFallIsPlusG) {
  const auto d = dynamics_derivative(RigidBodyState{}, Wrench{}, {}, hexa());
  EXPECT_LE((d.velocity_dot - Vec3(0, 0, 9.81)).norm(), 1e-15);
}

TEST(Dynamics, MatchesNewtonEulerOnRandomStates) {
  std::mt19937_64 rng(7);
  const auto& c = hexa();
  for (int k = 0; k < 50; ++k) {
    RigidBodyState s;
    s.rotation = euler_to_rotation(random_vec(rng, 1.0));
    s.body_rate = random_vec(rng, 3.0);
    Wrench w{random_vec(rng, 5.0), random_vec(rng, 0.2)};
    Disturbance dist{random_vec(rng, 1.0), random_vec(rng, 0.05)};
    const auto d = dynamics_derivative(s, w, dist, c);
    const Vec3 acc = Vec3(0, 0, c.gravity) + (s.rotation * w.force + dist.force) / c.mass;
    const Vec3 wdot = c.inertia.inverse() * (w.torque - s.body_rate.cross(c.inertia * s.body_rate) + dist.torque);
    EXPECT_LE((d.velocity_dot - acc).norm(), 1e-12);
    EXPECT_LE((d.body_rate_dot - wdot).norm(), 1e-10 * (1.0 + wdot.norm()));
    EXPECT_LE((d.rotation_dot - s.rotation * skew(s.body_rate)).norm(), 1e-12);
  }
}

TEST(Dynamics, TorqueFreeBodyConservesWorldAngularMomentum) {
  const auto& c = hexa();
  RigidBodyState s;
  s.body_rate = Vec3(1.0, -0.5, 2.0);
  const Vec3 h0 = s.rotation * c.inertia * s.body_rate;
  const double dt = 1e-4;
  auto deriv = [&](const RigidBodyState& x) { return dynamics_derivative(x, Wrench{}, {}, c); };
  auto add = [](RigidBodyState x, const RigidBodyDerivative& d, double h) {
    x.rotation += h * d.rotation_dot;
    x.body_rate += h * d.body_rate_dot;
    return x;
  };
  for (int k = 0; k < 100000; ++k) {
    const auto k1 = deriv(s);
    const auto k2 = deriv(add(s, k1, dt / 2));
    const auto k3 = deriv(add(s, k2, dt / 2));
    const auto k4 = deriv(add(s, k3, dt));
    s.rotation += dt / 6 * (k1.rotation_dot + 2 * k2.rotation_dot + 2 * k3.rotation_dot + k4.rotation_dot);
    s.body_rate += dt / 6 * (k1.body_rate_dot + 2 * k2.body_rate_dot + 2 * k3.body_rate_dot + k4.body_rate_dot);
    s.rotation = orthonormalize(s.rotation);
  }
  EXPECT_LE((s.rotation * c.inertia * s.body_rate - h0).norm() / h0.norm(), 1e-6);
}

TEST(Orthonormalize, ProjectsOntoRotations) {
  Mat3 m = euler_to_rotation(Vec3(0.2, 0.3, -0.1));
  m(0, 1) += 1e-3;
  const Mat3 r = orthonormalize(m);
  EXPECT_LE((r.transpose() * r - Mat3::Identity()).norm(), 1e-12);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
}

TEST(WrapAngle, Range) {
  EXPECT_NEAR(wrap_angle(M_PI + 0.1), -M_PI + 0.1, 1e-12);
  EXPECT_NEAR(wrap_angle(-M_PI - 0.1), M_PI - 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(wrap_angle(0.5), 0.5);
}
