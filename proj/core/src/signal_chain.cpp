#include "oactl/signal_chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oactl/model.hpp"

namespace oactl {

void FilterParams::validate() const {
  if (!(natural_frequency > 0.0) || !(dt > 0.0)) throw std::invalid_argument("filter: frequency and dt must be positive");
  if (natural_frequency * dt >= 1.0) throw std::invalid_argument("filter: natural_frequency * dt must be below 1");
  if (!(damping > 0.0) || damping > 1.0) throw std::invalid_argument("filter: damping must lie in (0, 1]");
}

LowPassFilter::LowPassFilter(const FilterParams& params, Eigen::Index channels) : params_(params) {
  params_.validate();
  const double k = 2.0 / params.dt;
  const double w = params.natural_frequency;
  const double z = params.damping;
  const double a0 = k * k + 2.0 * z * w * k + w * w;
  b0_ = w * w / a0;
  b1_ = 2.0 * w * w / a0;
  b2_ = w * w / a0;
  a1_ = (2.0 * w * w - 2.0 * k * k) / a0;
  a2_ = (k * k - 2.0 * z * w * k + w * w) / a0;
  s1_ = Eigen::VectorXd::Zero(channels);
  s2_ = Eigen::VectorXd::Zero(channels);
  y_ = Eigen::VectorXd::Zero(channels);
}

void LowPassFilter::reset(const Eigen::VectorXd& value) {
  if (value.size() != y_.size()) throw std::invalid_argument("filter: channel count mismatch");
  y_ = value;
  s2_ = (b2_ - a2_) * value;
  s1_ = (1.0 - b0_) * value;
  initialized_ = true;
}

Eigen::VectorXd LowPassFilter::step(const Eigen::VectorXd& sample) {
  if (!initialized_) reset(sample);
  y_ = b0_ * sample + s1_;
  s1_ = b1_ * sample - a1_ * y_ + s2_;
  s2_ = b2_ * sample - a2_ * y_;
  return y_;
}

FilteredDerivative::FilteredDerivative(const FilterParams& params, Eigen::Index channels)
    : filter_(params, channels), previous_(Eigen::VectorXd::Zero(channels)), derivative_(Eigen::VectorXd::Zero(channels)) {}

void FilteredDerivative::reset(const Eigen::VectorXd& value) {
  filter_.reset(value);
  previous_ = value;
  derivative_.setZero();
  has_previous_ = true;
}

Eigen::VectorXd FilteredDerivative::step(const Eigen::VectorXd& sample) {
  const Eigen::VectorXd y = filter_.step(sample);
  if (has_previous_) {
    derivative_ = (y - previous_) / filter_.params().dt;
  } else {
    derivative_.setZero();
    has_previous_ = true;
  }
  previous_ = y;
  return derivative_;
}

double actuator_lag_step(double state, double command, double dt, double time_constant, double lo, double hi) {
  const double gain = 1.0 - std::exp(-dt / time_constant);
  return std::clamp(state + gain * (command - state), lo, hi);
}

ActuatorState actuator_lag_step(const ActuatorState& state, const ActuatorState& command, double dt,
                                const ActuatorParams& params, const MultirotorConfig& config) {
  ActuatorState next = state;
  const double tau = params.time_constant;
  for (std::size_t i = 0; i < config.motor_count(); ++i) {
    const auto& lim = config.motors[i];
    auto& m = next.motors[i];
    const auto& c = command.motors.at(i);
    m.alpha = actuator_lag_step(m.alpha, c.alpha, dt, tau, lim.alpha_min, lim.alpha_max);
    m.beta = actuator_lag_step(m.beta, c.beta, dt, tau, lim.beta_min, lim.beta_max);
    m.omega = actuator_lag_step(m.omega, c.omega, dt, tau, lim.omega_min, lim.omega_max);
  }
  return next;
}

Wrench estimate_body_wrench(const ActuatorState& filtered, const MultirotorConfig& config) {
  return total_wrench(config, filtered);
}

}  // namespace oactl
