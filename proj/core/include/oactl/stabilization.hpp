#pragma once

#include <limits>

#include <Eigen/Core>

#include "oactl/control_blocks.hpp"
#include "oactl/types.hpp"
#include "oactl/wls.hpp"

namespace oactl {

/// Omega_dot_ref = K_Omega(E(mu_m) K_mu(mu_c - mu_m) - Omega_m), per axis.
struct InnerGains {
  FirstOrderParams attitude = FirstOrderParams::static_gain(7.0);
  FirstOrderParams rate = FirstOrderParams::static_gain(25.0);
};

class AttitudeLinearLaw {
 public:
  AttitudeLinearLaw() = default;
  AttitudeLinearLaw(const InnerGains& gains, double dt);

  Vec3 step(const Vec3& mu_c, const Vec3& mu_m, const Vec3& omega_m);
  void reset();

 private:
  FirstOrderBlock attitude_;
  FirstOrderBlock rate_;
};

/// delta_tau_c = I_B (Omega_dot_ref - Omega_dot_m).
Vec3 inner_indi_law(const Vec3& omega_dot_ref, const Vec3& omega_dot_m, const Mat3& inertia);

/// B'', 6 x 4n: partials of the body wrench w.r.t. (alpha_i, beta_i, gamma_i, omega_i).
Eigen::MatrixXd actuator_jacobian(const MultirotorConfig& config, const ActuatorState& u_a_m);

/// min gamma_in ||W_nu (B'' du - dnu)||^2 + ||W_a du||^2 over (alpha, beta, omega)
/// of every motor; gamma stays fixed.
struct InnerAllocationWeights {
  double gamma_in = 1000.0;
  Vec6 w_nu = (Vec6() << 1, 1, 1, 100, 100, 100).finished();
  double w_tilt = 1.0;
  double w_omega = 0.01;
  // Regularize toward equal per-rotor shares of the target body force
  // instead of toward u_a_m.
  bool prefer_uniform = true;
  // Per-step bounds on |u_a_c - u_a_m|, where the linearization holds.
  double max_tilt_step = std::numeric_limits<double>::infinity();   // rad
  double max_omega_step = std::numeric_limits<double>::infinity();  // rad/s

  void validate() const;
};

struct InnerAllocationResult {
  ActuatorState command;
  Eigen::VectorXd delta;  // 3n increments (alpha, beta, omega per motor)
  WlsSolution solution;
};

WlsProblem inner_allocation_problem(const Vec6& delta_nu_c, const ActuatorState& u_a_m,
                                    const MultirotorConfig& config, const InnerAllocationWeights& weights);

InnerAllocationResult inner_allocation_step(const Vec6& delta_nu_c, const ActuatorState& u_a_m,
                                            const MultirotorConfig& config,
                                            const InnerAllocationWeights& weights, WlsSolver& solver);

}  // namespace oactl
