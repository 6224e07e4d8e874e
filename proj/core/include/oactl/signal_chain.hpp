#pragma once

#include <Eigen/Core>

#include "oactl/types.hpp"

namespace oactl {

/// H(s) = wn^2 / (s^2 + 2 zeta wn s + wn^2), sampled every dt.
struct FilterParams {
  double natural_frequency = 50.0;  // rad/s
  double damping = 0.55;
  double dt = 0.002;

  void validate() const;
};

/// Multi-channel second-order low-pass, bilinear transform, unit DC gain.
/// All channels share coefficients so every filtered signal sees the same
/// delay.
class LowPassFilter {
 public:
  LowPassFilter() = default;
  LowPassFilter(const FilterParams& params, Eigen::Index channels);

  /// Seed the internal state as if `value` had been applied forever.
  void reset(const Eigen::VectorXd& value);
  Eigen::VectorXd step(const Eigen::VectorXd& sample);

  bool initialized() const { return initialized_; }
  const Eigen::VectorXd& output() const { return y_; }
  const FilterParams& params() const { return params_; }

 private:
  FilterParams params_;
  double b0_ = 0, b1_ = 0, b2_ = 0, a1_ = 0, a2_ = 0;
  Eigen::VectorXd s1_, s2_, y_;
  bool initialized_ = false;
};

/// Backward difference of the low-pass output.
class FilteredDerivative {
 public:
  FilteredDerivative() = default;
  FilteredDerivative(const FilterParams& params, Eigen::Index channels);

  void reset(const Eigen::VectorXd& value);
  /// Returns the derivative estimate; zero until two samples were seen.
  Eigen::VectorXd step(const Eigen::VectorXd& sample);

  const Eigen::VectorXd& filtered() const { return filter_.output(); }
  const Eigen::VectorXd& derivative() const { return derivative_; }

 private:
  LowPassFilter filter_;
  Eigen::VectorXd previous_;
  Eigen::VectorXd derivative_;
  bool has_previous_ = false;
};

/// A(s) = 1 / (tau s + 1).
struct ActuatorParams {
  double time_constant = 1.0 / 53.94;
};

/// Exact zero-order-hold update of the first-order lag, clipped to [lo, hi].
double actuator_lag_step(double state, double command, double dt, double time_constant, double lo, double hi);

/// Applies the lag to every servo angle and rotor speed of `state`.
ActuatorState actuator_lag_step(const ActuatorState& state, const ActuatorState& command, double dt,
                                const ActuatorParams& params, const MultirotorConfig& config);

/// Body wrench from filtered actuator states.
Wrench estimate_body_wrench(const ActuatorState& filtered, const MultirotorConfig& config);

}  // namespace oactl
