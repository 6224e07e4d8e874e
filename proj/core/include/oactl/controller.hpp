#pragma once

#include <memory>
#include <optional>

#include "oactl/force_sets.hpp"
#include "oactl/guidance.hpp"
#include "oactl/signal_chain.hpp"
#include "oactl/stabilization.hpp"
#include "oactl/types.hpp"
#include "oactl/wls.hpp"

namespace oactl {

struct ControllerConfig {
  double dt = 0.002;
  FilterParams filter;  // filter.dt is forced to dt
  OuterGains outer;
  InnerGains inner;
  AllocationWeights guidance_weights;
  InnerAllocationWeights inner_weights;
  AttitudeLimits attitude_limits;
  TiltGrid grid;
  int icosphere_subdivisions = 2;
  double force_margin = 0.0;  // N, S(0) facets pulled inward by this much
  double min_bandwidth_ratio = 1.2;

  /// Stability of both cascades on the nominal double integrator and the
  /// inner/outer bandwidth ratio. Throws std::invalid_argument.
  void validate() const;
  double outer_bandwidth() const;
  double inner_bandwidth() const;
};

/// Raw sensor values handed to the controller every period.
struct Measurements {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 euler = Vec3::Zero();
  Vec3 body_rate = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();  // world frame, includes gravity and disturbances
  ActuatorState actuators;
};

struct ControlOutput {
  ActuatorState command;
  Vec3 xi_ddot_ref = Vec3::Zero();
  Vec3 delta_xi_ddot = Vec3::Zero();
  Vec3 f_b_m = Vec3::Zero();
  Vec3 f_b_ref = Vec3::Zero();
  Vec3 delta_force = Vec3::Zero();
  Vec3 mu_m = Vec3::Zero();
  Vec3 mu_c = Vec3::Zero();
  Vec3 omega_dot_ref = Vec3::Zero();
  Vec3 delta_tau = Vec3::Zero();
  WlsStatus guidance_status = WlsStatus::kOptimal;
  WlsStatus inner_status = WlsStatus::kOptimal;
  int guidance_iterations = 0;
  int inner_iterations = 0;
  int active_constraints = 0;  // guidance QP
  double guidance_solve_time = 0.0;  // s, zero unless timing is enabled
  double step_time = 0.0;            // s, whole control step, same condition
  double slice_violation = 0.0;      // commanded lateral force vs the S(0) slice (N)
  bool slice_clamped = false;
};

/// Builds S(tau = 0) for `model` with the controller's grid and directions.
std::shared_ptr<const ZeroTorqueSet> build_zero_torque_set(const MultirotorConfig& model,
                                                           const ControllerConfig& config);

/// Cascaded guidance INDI + stabilization INDI with both WLS allocations.
/// Every measured signal runs through the same H(s).
class FlightController {
 public:
  FlightController(const MultirotorConfig& model, const ControllerConfig& config,
                   std::shared_ptr<const ZeroTorqueSet> s0 = nullptr);

  /// Seeds every filter at steady state on `m`.
  void initialize(const Measurements& m);
  ControlOutput step(const Measurements& m, const Vec3& xi_ref, const Vec3& mu_ref);

  void set_timing(bool on) { timing_ = on; }
  const ZeroTorqueSet& zero_torque_set() const { return *s0_; }
  const MultirotorConfig& model() const { return model_; }
  const ControllerConfig& config() const { return config_; }

 private:
  Eigen::VectorXd pack(const Measurements& m, double yaw) const;
  double unwrap_yaw(double yaw);

  MultirotorConfig model_;
  ControllerConfig config_;
  std::shared_ptr<const ZeroTorqueSet> s0_;
  LowPassFilter filter_;
  FilteredDerivative rate_derivative_;
  OuterLinearLaw outer_;
  AttitudeLinearLaw attitude_;
  WlsSolver guidance_solver_;
  WlsSolver inner_solver_;
  std::optional<Vec6> warm_start_;
  std::optional<double> last_yaw_;
  double yaw_offset_ = 0.0;
  bool timing_ = false;
};

}  // namespace oactl
