#include "oactl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace oactl {

namespace {

Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

// Zero-tilt motor frame: x_M = x_B, z_M = -z_B.
const Mat3& zero_tilt_rotation() {
  static const Mat3 r = rot_x(std::numbers::pi);
  return r;
}

}  // namespace

Eigen::VectorXd ActuatorState::to_vector() const {
  Eigen::VectorXd u(kPerMotor * static_cast<Eigen::Index>(motors.size()));
  for (std::size_t i = 0; i < motors.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(kPerMotor * i);
    u[k] = motors[i].alpha;
    u[k + 1] = motors[i].beta;
    u[k + 2] = motors[i].gamma;
    u[k + 3] = motors[i].omega;
  }
  return u;
}

ActuatorState ActuatorState::from_vector(const Eigen::VectorXd& u) {
  if (u.size() % kPerMotor != 0) {
    throw std::invalid_argument("actuator vector length must be a multiple of 4");
  }
  ActuatorState a;
  a.motors.resize(static_cast<std::size_t>(u.size() / kPerMotor));
  for (std::size_t i = 0; i < a.motors.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(kPerMotor * i);
    a.motors[i] = {u[k], u[k + 1], u[k + 2], u[k + 3]};
  }
  return a;
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

Mat3 euler_to_rotation(const Vec3& euler) {
  return rot_x(euler.x()) * rot_y(euler.y()) * rot_z(euler.z());
}

EulerExtraction rotation_to_euler_checked(const Mat3& r) {
  EulerExtraction out;
  const double s_theta = std::clamp(r(0, 2), -1.0, 1.0);
  if (std::abs(s_theta) > 1.0 - 1e-9) {
    // Roll and yaw share one axis; put everything in yaw.
    out.gimbal_lock = true;
    const double theta = std::copysign(std::numbers::pi / 2.0, s_theta);
    out.euler = Vec3(0.0, theta, std::atan2(r(1, 0), r(1, 1)));
    return out;
  }
  out.euler = Vec3(std::atan2(-r(1, 2), r(2, 2)), std::asin(s_theta), std::atan2(-r(0, 1), r(0, 0)));
  return out;
}

Vec3 rotation_to_euler(const Mat3& rotation) { return rotation_to_euler_checked(rotation).euler; }

Mat3 euler_rate_to_body_rate(const Vec3& euler) {
  // Omega = Rz^T Ry^T e_x phi_dot + Rz^T e_y theta_dot + e_z psi_dot
  const Mat3 rz_t = rot_z(euler.z()).transpose();
  const Mat3 ry_t = rot_y(euler.y()).transpose();
  Mat3 e;
  e.col(0) = rz_t * ry_t * Vec3::UnitX();
  e.col(1) = rz_t * Vec3::UnitY();
  e.col(2) = Vec3::UnitZ();
  return e;
}

Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

Mat3 motor_rotation(double alpha, double beta, double gamma) {
  return rot_x(alpha) * rot_y(beta) * rot_z(gamma) * zero_tilt_rotation();
}

Vec3 thrust_direction(double alpha, double beta, double gamma) {
  return motor_rotation(alpha, beta, gamma).col(2);
}

MotorOutput motor_thrust_torque(double omega, const MultirotorConfig& config, std::size_t motor) {
  if (omega < 0.0) {
    throw std::invalid_argument("rotor speed must be non-negative");
  }
  const double w2 = omega * omega;
  return {config.k_t * w2, config.motors.at(motor).spin * config.k_d * w2};
}

Eigen::MatrixXd AllocationMatrices::stacked() const {
  Eigen::MatrixXd b(6, force.cols());
  b << force, torque;
  return b;
}

Mat3 motor_torque_map(const MultirotorConfig& config, std::size_t motor) {
  const auto& m = config.motors[motor];
  return skew(m.position) + config.drag_ratio() * m.spin * Mat3::Identity();
}

AllocationMatrices allocation_matrices(const MultirotorConfig& config) {
  const auto n = static_cast<Eigen::Index>(config.motor_count());
  AllocationMatrices b{Eigen::MatrixXd::Zero(3, 3 * n), Eigen::MatrixXd::Zero(3, 3 * n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    b.force.block<3, 3>(0, 3 * i) = Mat3::Identity();
    b.torque.block<3, 3>(0, 3 * i) = motor_torque_map(config, static_cast<std::size_t>(i));
  }
  return b;
}

Eigen::MatrixXd extended_allocation_matrix(const MultirotorConfig& config,
                                           const ActuatorState& actuators) {
  const std::size_t n = config.motor_count();
  Eigen::MatrixXd b(6, 3 * static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = actuators.motors.at(i);
    const Mat3 r = motor_rotation(a.alpha, a.beta, a.gamma);
    const auto col = static_cast<Eigen::Index>(3 * i);
    b.block<3, 3>(0, col) = r;
    b.block<3, 3>(3, col) = motor_torque_map(config, i) * r;
  }
  return b;
}

Eigen::VectorXd motor_force_vector(const MultirotorConfig& config, const ActuatorState& actuators) {
  const std::size_t n = config.motor_count();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(3 * static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double w = actuators.motors.at(i).omega;
    f[static_cast<Eigen::Index>(3 * i + 2)] = config.k_t * w * w;
  }
  return f;
}

Wrench total_wrench(const MultirotorConfig& config, const ActuatorState& actuators) {
  Wrench w;
  for (std::size_t i = 0; i < config.motor_count(); ++i) {
    const auto& a = actuators.motors.at(i);
    const Vec3 f = config.k_t * a.omega * a.omega * thrust_direction(a.alpha, a.beta, a.gamma);
    w.force += f;
    w.torque += motor_torque_map(config, i) * f;
  }
  return w;
}

RigidBodyDerivative dynamics_derivative(const RigidBodyState& state, const Wrench& wrench,
                                        const Disturbance& disturbance,
                                        const MultirotorConfig& config) {
  RigidBodyDerivative d;
  d.position_dot = state.velocity;
  d.velocity_dot = config.gravity * Vec3::UnitZ() +
                   (state.rotation * wrench.force + disturbance.force) / config.mass;
  d.rotation_dot = state.rotation * skew(state.body_rate);
  const Vec3& w = state.body_rate;
  d.body_rate_dot = config.inertia.ldlt().solve(wrench.torque - w.cross(config.inertia * w) +
                                                disturbance.torque);
  return d;
}

ActuatorState hover_actuators(const MultirotorConfig& config) {
  const double n = static_cast<double>(config.motor_count());
  const double omega = std::sqrt(config.mass * config.gravity / (n * config.k_t));
  ActuatorState a;
  a.motors.reserve(config.motor_count());
  for (const auto& m : config.motors) {
    a.motors.push_back({0.0, 0.0, m.gamma, omega});
  }
  return a;
}

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle + std::numbers::pi, two_pi);
  if (a <= 0.0) a += two_pi;
  return a - std::numbers::pi;
}

}  // namespace oactl
