#include "oactl/controller.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "oactl/model.hpp"

namespace oactl {

namespace {

// Layout of the filtered measurement vector.
constexpr Eigen::Index kPos = 0, kVel = 3, kEuler = 6, kAcc = 9, kAct = 12;

}  // namespace

double ControllerConfig::outer_bandwidth() const { return cascade_bandwidth(outer.position, outer.velocity); }
double ControllerConfig::inner_bandwidth() const { return cascade_bandwidth(inner.attitude, inner.rate); }

void ControllerConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("controller dt must be positive");
  FilterParams f = filter;
  f.dt = dt;
  f.validate();
  guidance_weights.validate();
  inner_weights.validate();
  for (const auto* k : {&outer.position, &outer.velocity, &inner.attitude, &inner.rate}) k->validate();
  if (!cascade_is_stable(outer.position, outer.velocity)) throw std::invalid_argument("outer loop is unstable");
  if (!cascade_is_stable(inner.attitude, inner.rate)) throw std::invalid_argument("inner loop is unstable");
  const double wo = outer_bandwidth(), wi = inner_bandwidth();
  if (wi < min_bandwidth_ratio * wo) {
    std::ostringstream msg;
    msg << "inner bandwidth " << wi << " rad/s is below " << min_bandwidth_ratio << " x outer bandwidth " << wo
        << " rad/s";
    throw std::invalid_argument(msg.str());
  }
  if (grid.n_alpha < 3 || grid.n_beta < 3) throw std::invalid_argument("force set grid must be at least 3x3");
  if (!(force_margin >= 0.0)) throw std::invalid_argument("force margin must be non-negative");
  if (icosphere_subdivisions < 1) throw std::invalid_argument("icosphere subdivisions must be >= 1");
}

std::shared_ptr<const ZeroTorqueSet> build_zero_torque_set(const MultirotorConfig& model,
                                                           const ControllerConfig& config) {
  ForceSetOptions opts;
  opts.grid = config.grid;
  opts.directions = icosphere_directions(config.icosphere_subdivisions);
  opts.approximation = SetApproximation::kInner;
  Polytope s0 = feasible_force_set(model, Vec3::Zero(), opts);
  if (config.force_margin > 0.0 && !s0.empty()) {
    s0.b.array() -= config.force_margin;
    s0.vertices.reset();
  }
  return std::make_shared<const ZeroTorqueSet>(std::move(s0));
}

FlightController::FlightController(const MultirotorConfig& model, const ControllerConfig& config,
                                   std::shared_ptr<const ZeroTorqueSet> s0)
    : model_(model), config_(config), s0_(std::move(s0)) {
  config_.filter.dt = config_.dt;
  if (!s0_) s0_ = build_zero_torque_set(model_, config_);
  const auto channels = kAct + 3 * static_cast<Eigen::Index>(model_.motor_count());
  filter_ = LowPassFilter(config_.filter, channels);
  rate_derivative_ = FilteredDerivative(config_.filter, 3);
  outer_ = OuterLinearLaw(config_.outer, config_.dt);
  attitude_ = AttitudeLinearLaw(config_.inner, config_.dt);
}

double FlightController::unwrap_yaw(double yaw) {
  if (last_yaw_) {
    const double jump = yaw - *last_yaw_;
    if (jump > std::numbers::pi) yaw_offset_ -= 2.0 * std::numbers::pi;
    if (jump < -std::numbers::pi) yaw_offset_ += 2.0 * std::numbers::pi;
  }
  last_yaw_ = yaw;
  return yaw + yaw_offset_;
}

Eigen::VectorXd FlightController::pack(const Measurements& m, double yaw) const {
  Eigen::VectorXd v(kAct + 3 * static_cast<Eigen::Index>(model_.motor_count()));
  v.segment<3>(kPos) = m.position;
  v.segment<3>(kVel) = m.velocity;
  v.segment<3>(kEuler) = Vec3(m.euler.x(), m.euler.y(), yaw);
  v.segment<3>(kAcc) = m.acceleration;
  for (std::size_t i = 0; i < model_.motor_count(); ++i) {
    const auto& a = m.actuators.motors.at(i);
    v.segment<3>(kAct + 3 * static_cast<Eigen::Index>(i)) << a.alpha, a.beta, a.omega;
  }
  return v;
}

void FlightController::initialize(const Measurements& m) {
  last_yaw_.reset();
  yaw_offset_ = 0.0;
  filter_.reset(pack(m, unwrap_yaw(m.euler.z())));
  rate_derivative_.reset(m.body_rate);
  outer_.reset();
  attitude_.reset();
  warm_start_.reset();
}

ControlOutput FlightController::step(const Measurements& m, const Vec3& xi_ref, const Vec3& mu_ref) {
  const auto start = timing_ ? std::chrono::steady_clock::now() : std::chrono::steady_clock::time_point{};
  ControlOutput out;
  const double yaw = unwrap_yaw(m.euler.z());
  const Eigen::VectorXd y = filter_.step(pack(m, yaw));
  rate_derivative_.step(m.body_rate);
  const Vec3 xi_m = y.segment<3>(kPos);
  const Vec3 v_m = y.segment<3>(kVel);
  const Vec3 mu_m = y.segment<3>(kEuler);
  const Vec3 acc_m = y.segment<3>(kAcc);
  const Vec3 omega_m = rate_derivative_.filtered();
  const Vec3 omega_dot_m = rate_derivative_.derivative();
  ActuatorState u_a_m;
  u_a_m.motors.resize(model_.motor_count());
  for (std::size_t i = 0; i < model_.motor_count(); ++i) {
    const auto k = kAct + 3 * static_cast<Eigen::Index>(i);
    u_a_m.motors[i] = {y[k], y[k + 1], model_.motors[i].gamma, std::max(y[k + 2], 0.0)};
  }
  const Wrench w_m = estimate_body_wrench(u_a_m, model_);
  out.mu_m = mu_m;
  out.f_b_m = w_m.force;

  // Guidance.
  out.xi_ddot_ref = outer_.step(xi_ref, xi_m, v_m);
  out.delta_xi_ddot = out.xi_ddot_ref - acc_m;
  const Mat3 r_m = euler_to_rotation(mu_m);
  out.f_b_ref = reference_body_force(model_.mass, out.delta_xi_ddot, r_m, w_m.force);
  const GuidanceConstraints cons =
      build_constraints(*s0_, out.f_b_ref, w_m.force, mu_m, config_.attitude_limits);
  out.slice_clamped = cons.clamped;
  Vec6 u_xi_m;
  u_xi_m << w_m.force, mu_m;

  const auto t0 = timing_ ? std::chrono::steady_clock::now() : std::chrono::steady_clock::time_point{};
  const GuidanceResult g = guidance_allocation_step(model_.mass, out.delta_xi_ddot, u_xi_m, mu_ref,
                                                    config_.guidance_weights, cons, guidance_solver_, warm_start_);
  if (timing_) out.guidance_solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.guidance_status = g.solution.status;
  out.guidance_iterations = g.solution.iterations;
  out.active_constraints = static_cast<int>(g.solution.active.size());
  if (g.solution.status == WlsStatus::kInfeasible) throw std::runtime_error("guidance allocation infeasible");
  warm_start_ = g.delta_u;
  out.delta_force = g.delta_force;
  out.mu_c = g.mu_c;
  const Eigen::Vector2d lateral = (w_m.force + g.delta_force).head<2>();
  out.slice_violation = std::max(0.0, (cons.slice.a * lateral - cons.slice.b).maxCoeff());

  // Stabilization.
  out.omega_dot_ref = attitude_.step(out.mu_c, mu_m, omega_m);
  out.delta_tau = inner_indi_law(out.omega_dot_ref, omega_dot_m, model_.inertia);
  Vec6 delta_nu;
  delta_nu << out.delta_force, out.delta_tau;
  const InnerAllocationResult inner =
      inner_allocation_step(delta_nu, u_a_m, model_, config_.inner_weights, inner_solver_);
  out.inner_status = inner.solution.status;
  out.inner_iterations = inner.solution.iterations;
  out.command = inner.command;
  if (timing_) out.step_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace oactl
