#include "oactl/stabilization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oactl/force_sets.hpp"
#include "oactl/guidance.hpp"
#include "oactl/model.hpp"

namespace oactl {

AttitudeLinearLaw::AttitudeLinearLaw(const InnerGains& gains, double dt)
    : attitude_(gains.attitude, dt, 3), rate_(gains.rate, dt, 3) {}

Vec3 AttitudeLinearLaw::step(const Vec3& mu_c, const Vec3& mu_m, const Vec3& omega_m) {
  const Vec3 euler_rate_ref = attitude_.step(attitude_error(mu_c, mu_m));
  const Vec3 omega_ref = euler_rate_to_body_rate(mu_m) * euler_rate_ref;
  return rate_.step(omega_ref - omega_m);
}

void AttitudeLinearLaw::reset() {
  attitude_.reset();
  rate_.reset();
}

Vec3 inner_indi_law(const Vec3& omega_dot_ref, const Vec3& omega_dot_m, const Mat3& inertia) {
  return inertia * (omega_dot_ref - omega_dot_m);
}

Eigen::MatrixXd actuator_jacobian(const MultirotorConfig& config, const ActuatorState& u_a_m) {
  const std::size_t n = config.motor_count();
  if (u_a_m.motors.size() != n) throw std::invalid_argument("actuator_jacobian: motor count mismatch");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(6, 4 * static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = u_a_m.motors[i];
    const double sa = std::sin(m.alpha), ca = std::cos(m.alpha);
    const double sb = std::sin(m.beta), cb = std::cos(m.beta);
    const Vec3 dir = thrust_direction(m.alpha, m.beta, m.gamma);
    const double f = config.k_t * m.omega * m.omega;
    Eigen::Matrix<double, 6, 3> map;
    map.topRows<3>() = Mat3::Identity();
    map.bottomRows<3>() = motor_torque_map(config, i);
    const auto c = static_cast<Eigen::Index>(4 * i);
    j.col(c) = map * (f * Vec3(0.0, ca * cb, sa * cb));
    j.col(c + 1) = map * (f * Vec3(-cb, -sa * sb, ca * sb));
    j.col(c + 3) = map * (2.0 * config.k_t * m.omega * dir);
  }
  return j;
}

void InnerAllocationWeights::validate() const {
  if (!(gamma_in > 0.0)) throw std::invalid_argument("gamma_in must be positive");
  if (!(w_nu.array() > 0.0).all()) throw std::invalid_argument("W_nu entries must be positive");
  if (!(w_tilt > 0.0) || !(w_omega > 0.0)) throw std::invalid_argument("W_a entries must be positive");
  if (!(max_tilt_step > 0.0) || !(max_omega_step > 0.0)) throw std::invalid_argument("inner step bounds must be positive");
}

WlsProblem inner_allocation_problem(const Vec6& delta_nu_c, const ActuatorState& u_a_m,
                                    const MultirotorConfig& config, const InnerAllocationWeights& weights) {
  const std::size_t n = config.motor_count();
  const auto vars = static_cast<Eigen::Index>(3 * n);
  const Eigen::MatrixXd full = actuator_jacobian(config, u_a_m);
  Eigen::MatrixXd b2(6, vars);
  Eigen::VectorXd w_a(vars), lower(vars), upper(vars), preferred = Eigen::VectorXd::Zero(vars);
  const Vec3 share = (total_wrench(config, u_a_m).force + delta_nu_c.head<3>()) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = static_cast<Eigen::Index>(4 * i);
    const auto t = static_cast<Eigen::Index>(3 * i);
    b2.col(t) = full.col(s);
    b2.col(t + 1) = full.col(s + 1);
    b2.col(t + 2) = full.col(s + 3);
    const auto& lim = config.motors[i];
    const auto& m = u_a_m.motors[i];
    w_a.segment<3>(t) << weights.w_tilt, weights.w_tilt, weights.w_omega;
    if (weights.prefer_uniform) {
      const MotorInversion inv = invert_motor_force(config, i, share);
      preferred.segment<3>(t) << std::clamp(inv.alpha, lim.alpha_min, lim.alpha_max) - m.alpha,
          std::clamp(inv.beta, lim.beta_min, lim.beta_max) - m.beta,
          std::clamp(inv.omega, lim.omega_min, lim.omega_max) - m.omega;
    }
    // Filtered states may sit marginally outside the limits; keep 0 feasible.
    const double ts = weights.max_tilt_step, ws = weights.max_omega_step;
    lower.segment<3>(t) << std::min(std::max(lim.alpha_min - m.alpha, -ts), 0.0),
        std::min(std::max(lim.beta_min - m.beta, -ts), 0.0), std::min(std::max(lim.omega_min - m.omega, -ws), 0.0);
    upper.segment<3>(t) << std::max(std::min(lim.alpha_max - m.alpha, ts), 0.0),
        std::max(std::min(lim.beta_max - m.beta, ts), 0.0), std::max(std::min(lim.omega_max - m.omega, ws), 0.0);
  }
  const double sg = std::sqrt(weights.gamma_in);
  WlsProblem p;
  p.a.resize(6 + vars, vars);
  p.b.resize(6 + vars);
  p.a.topRows<6>() = sg * weights.w_nu.asDiagonal() * b2;
  p.b.head<6>() = sg * weights.w_nu.asDiagonal() * delta_nu_c;
  p.a.bottomRows(vars) = w_a.asDiagonal();
  p.b.tail(vars) = w_a.cwiseProduct(preferred);
  p.lower = lower;
  p.upper = upper;
  p.c.resize(0, vars);
  p.d.resize(0);
  p.warm_start = Eigen::VectorXd::Zero(vars);
  return p;
}

InnerAllocationResult inner_allocation_step(const Vec6& delta_nu_c, const ActuatorState& u_a_m,
                                            const MultirotorConfig& config,
                                            const InnerAllocationWeights& weights, WlsSolver& solver) {
  const WlsProblem p = inner_allocation_problem(delta_nu_c, u_a_m, config, weights);
  InnerAllocationResult r;
  r.solution = solver.solve(p);
  if (r.solution.status == WlsStatus::kInfeasible) throw std::logic_error("inner allocation infeasible");
  r.delta = r.solution.x;
  r.command = u_a_m;
  for (std::size_t i = 0; i < config.motor_count(); ++i) {
    const auto t = static_cast<Eigen::Index>(3 * i);
    const auto& lim = config.motors[i];
    auto& m = r.command.motors[i];
    m.alpha = std::clamp(m.alpha + r.delta[t], lim.alpha_min, lim.alpha_max);
    m.beta = std::clamp(m.beta + r.delta[t + 1], lim.beta_min, lim.beta_max);
    m.omega = std::clamp(m.omega + r.delta[t + 2], lim.omega_min, lim.omega_max);
    m.gamma = lim.gamma;
  }
  return r;
}

}  // namespace oactl
