#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace oactl {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Static description of one tilting rotor. Angles in rad, speeds in rad/s.
struct MotorSpec {
  Vec3 position = Vec3::Zero();  // d_i, body frame (m)
  int spin = 1;                  // c_i, +1 or -1
  double gamma = 0.0;            // fixed yaw tilt
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double beta_min = 0.0;
  double beta_max = 0.0;
  double omega_min = 0.0;
  double omega_max = 0.0;
};

/// Physical parameters of an over-actuated multirotor. NED world frame.
struct MultirotorConfig {
  double mass = 0.0;
  Mat3 inertia = Mat3::Identity();
  double gravity = 9.81;
  double k_t = 0.0;  // N/(rad/s)^2
  double k_d = 0.0;  // N m/(rad/s)^2
  std::vector<MotorSpec> motors;

  std::size_t motor_count() const { return motors.size(); }
  double drag_ratio() const { return k_d / k_t; }
  double max_motor_thrust(std::size_t i) const {
    const double w = motors[i].omega_max;
    return k_t * w * w;
  }
};

struct RigidBodyState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();  // body -> world
  Vec3 body_rate = Vec3::Zero();
};

/// Time derivative of RigidBodyState; rotation_dot = R * skew(Omega).
struct RigidBodyDerivative {
  Vec3 position_dot = Vec3::Zero();
  Vec3 velocity_dot = Vec3::Zero();
  Mat3 rotation_dot = Mat3::Zero();
  Vec3 body_rate_dot = Vec3::Zero();
};

struct MotorState {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double omega = 0.0;
};

/// The stacked actuator vector u_a = [alpha_1, beta_1, gamma_1, omega_1, ...].
struct ActuatorState {
  std::vector<MotorState> motors;

  static constexpr int kPerMotor = 4;

  Eigen::VectorXd to_vector() const;
  static ActuatorState from_vector(const Eigen::VectorXd& u);
};

struct Wrench {
  Vec3 force = Vec3::Zero();   // f_b
  Vec3 torque = Vec3::Zero();  // tau_b

  Vec6 stacked() const {
    Vec6 v;
    v << force, torque;
    return v;
  }
};

struct Disturbance {
  Vec3 force = Vec3::Zero();   // world frame (N)
  Vec3 torque = Vec3::Zero();  // body frame (N m)
};

}  // namespace oactl
