#pragma once

#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "oactl/controller.hpp"
#include "oactl/scenario.hpp"
#include "oactl/signal_chain.hpp"
#include "oactl/types.hpp"

namespace oactl {

/// Rigid body plus first-order actuators, integrated with RK4.
class Plant {
 public:
  Plant(const MultirotorConfig& vehicle, const ActuatorParams& actuator, int substeps);

  /// Advances by dt holding `command`; the actuator lag is evaluated exactly
  /// at every RK4 stage time. `disturbance_accel` is world-frame m/s^2.
  void advance(const ActuatorState& command, const Vec3& disturbance_accel, double dt);

  /// World-frame acceleration at the current state.
  Vec3 acceleration(const Vec3& disturbance_accel) const;

  RigidBodyState state;
  ActuatorState actuators;
  const MultirotorConfig& vehicle() const { return vehicle_; }

 private:
  MultirotorConfig vehicle_;
  ActuatorParams actuator_;
  int substeps_;
};

struct SimOptions {
  double mass_scale = 1.0;     // plant / controller model
  double inertia_scale = 1.0;
  double preroll = 1.0;        // s of hover before t = 0
  int substeps = 4;
  ActuatorParams actuator;
  bool timing = false;         // measure guidance solve time
  // With timing, each step is also replayed this many times on copies of
  // the controller and the fastest replay is recorded (filters out
  // preemption). 1 records the live step only.
  int timing_repeats = 1;
};

struct TelemetryRow {
  double t = 0.0;
  Vec3 xi_ref, xi, mu_ref, mu_c, mu_m, mu;
  std::vector<MotorState> command;
  std::vector<MotorState> actuators;
  Vec3 delta_force, f_b_ref;
  double solve_time = 0.0;
  int guidance_iterations = 0;
  int inner_iterations = 0;
  int active_constraints = 0;
  int solver_status = 0;  // 0 optimal, 1 guidance not optimal, 2 inner not optimal, 3 both
  double slice_violation = 0.0;
  Vec3 disturbance;
};

struct Telemetry {
  std::size_t motors = 0;
  std::vector<TelemetryRow> rows;

  std::vector<std::string> columns() const;
};

struct Metrics {
  double max_position_error = 0.0;
  double rms_position_error = 0.0;
  double max_attitude_error = 0.0;      // inf-norm of mu - mu_c
  double max_attitude_deviation = 0.0;  // inf-norm of mu
  double max_free_command_gap = 0.0;    // inf-norm of mu_c - mu_ref over steps with no active constraint
  std::vector<double> saturation_fraction;  // per channel (alpha_i, beta_i, omega_i): command at a limit
  double max_solve_time = 0.0;
  int max_guidance_iterations = 0;
  int max_inner_iterations = 0;
  int solver_failures = 0;
  double max_slice_violation = 0.0;
};

/// Metrics from telemetry alone, so a re-imported CSV reproduces them.
Metrics compute_metrics(const Telemetry& telemetry, const MultirotorConfig& limits);

class Simulation {
 public:
  /// `model` is the controller's model; the plant uses it scaled by options.
  Simulation(const MultirotorConfig& model, const ControllerConfig& controller, const ScenarioSpec& scenario,
             const SimOptions& options = {}, std::shared_ptr<const ZeroTorqueSet> s0 = nullptr);

  /// One control period: measure, control, record, integrate.
  void step();
  bool done() const;
  double time() const { return t_; }

  const Telemetry& telemetry() const { return telemetry_; }
  const Plant& plant() const { return plant_; }
  const FlightController& controller() const { return controller_; }
  /// Worst control step wall time so far; zero unless options.timing.
  double max_control_step_time() const { return max_step_time_; }
  /// Same, for the live step only when timing_repeats > 1.
  double max_raw_control_step_time() const { return max_raw_step_time_; }
  double max_raw_solve_time() const { return max_raw_solve_time_; }

 private:
  Measurements measure();

  ScenarioSpec scenario_;
  SimOptions options_;
  Plant plant_;
  FlightController controller_;
  Telemetry telemetry_;
  std::mt19937_64 rng_;
  double dt_;
  long step_index_ = 0;
  long total_steps_ = 0;
  double t_ = 0.0;
  double max_step_time_ = 0.0;
  double max_raw_step_time_ = 0.0;
  double max_raw_solve_time_ = 0.0;
};

struct RunResult {
  Telemetry telemetry;
  Metrics metrics;
};

RunResult run_scenario(const ScenarioSpec& scenario, const MultirotorConfig& model, const ControllerConfig& controller,
                       const SimOptions& options = {}, std::shared_ptr<const ZeroTorqueSet> s0 = nullptr);

/// Comma separated, one header row, %.17g numbers.
void write_csv(std::ostream& out, const Telemetry& telemetry);
void write_csv(const std::string& path, const Telemetry& telemetry);
Telemetry read_csv(std::istream& in);
Telemetry read_csv(const std::string& path);

}  // namespace oactl
