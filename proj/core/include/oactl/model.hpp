#pragma once

#include <optional>
#include <utility>

#include <Eigen/Core>

#include "oactl/types.hpp"

namespace oactl {

/// skew(v) * w == v.cross(w).
Mat3 skew(const Vec3& v);

/// R_B^W = Rx(phi) * Ry(theta) * Rz(psi).
Mat3 euler_to_rotation(const Vec3& euler);

struct EulerExtraction {
  Vec3 euler = Vec3::Zero();
  bool gimbal_lock = false;  // roll forced to zero
};

/// Inverse of euler_to_rotation. Pitch is returned in [-pi/2, pi/2].
EulerExtraction rotation_to_euler_checked(const Mat3& rotation);
Vec3 rotation_to_euler(const Mat3& rotation);

/// Maps Euler angle rates to body rates: Omega = E(mu) * mu_dot.
Mat3 euler_rate_to_body_rate(const Vec3& euler);

/// Nearest rotation matrix (polar projection).
Mat3 orthonormalize(const Mat3& m);

/// R_Mi^B = Rx(alpha) Ry(beta) Rz(gamma) R0, with R0 sending the motor z axis
/// to -z_B.
Mat3 motor_rotation(double alpha, double beta, double gamma);

/// Unit thrust direction of a motor in the body frame.
Vec3 thrust_direction(double alpha, double beta, double gamma);

struct MotorOutput {
  double thrust = 0.0;  // f_mi (N)
  double torque = 0.0;  // tau_mi (N m), signed by spin
};

/// Throws std::invalid_argument on negative speed.
MotorOutput motor_thrust_torque(double omega, const MultirotorConfig& config, std::size_t motor);

struct AllocationMatrices {
  Eigen::MatrixXd force;   // B1, 3 x 3n
  Eigen::MatrixXd torque;  // B2, 3 x 3n

  Eigen::MatrixXd stacked() const;
};

AllocationMatrices allocation_matrices(const MultirotorConfig& config);

/// Torque block of one motor: skew(d_i) + r c_i I.
Mat3 motor_torque_map(const MultirotorConfig& config, std::size_t motor);

/// B'(lambda), 6 x 3n. Tilt angles are read from `actuators`; speeds ignored.
Eigen::MatrixXd extended_allocation_matrix(const MultirotorConfig& config,
                                           const ActuatorState& actuators);

/// Stacked F(omega) = [f_m1 z_M, ...], each f_mi along the motor z axis.
Eigen::VectorXd motor_force_vector(const MultirotorConfig& config, const ActuatorState& actuators);

Wrench total_wrench(const MultirotorConfig& config, const ActuatorState& actuators);

RigidBodyDerivative dynamics_derivative(const RigidBodyState& state, const Wrench& wrench,
                                        const Disturbance& disturbance,
                                        const MultirotorConfig& config);

/// Hover actuator state: zero tilt, equal speeds carrying m g.
ActuatorState hover_actuators(const MultirotorConfig& config);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double angle);

}  // namespace oactl
