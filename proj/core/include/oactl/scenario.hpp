#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oactl/types.hpp"

namespace oactl {

/// offset + amplitude * sin(frequency * t + phase), per component.
struct SinusoidReference {
  Vec3 offset = Vec3::Zero();
  Vec3 amplitude = Vec3::Zero();
  Vec3 frequency = Vec3::Zero();  // rad/s
  Vec3 phase = Vec3::Zero();

  Vec3 operator()(double t) const;
};

/// Constant acceleration disturbance (m/s^2, world frame) on [t_start, t_end).
struct DisturbanceStep {
  double t_start = 0.0;
  double t_end = 0.0;
  Vec3 acceleration = Vec3::Zero();
};

struct SensorNoise {
  double position = 0.0;  // standard deviations
  double velocity = 0.0;
  double attitude = 0.0;
  double body_rate = 0.0;
  double acceleration = 0.0;

  bool enabled() const { return position > 0 || velocity > 0 || attitude > 0 || body_rate > 0 || acceleration > 0; }
};

struct ScenarioSpec {
  std::string id = "custom";
  double duration = 60.0;
  SinusoidReference position;
  SinusoidReference attitude;
  std::vector<DisturbanceStep> disturbances;
  SensorNoise noise;
  std::uint64_t seed = 0;

  /// Sum of the disturbance steps active at t.
  Vec3 disturbance_at(double t) const;
  /// Throws std::invalid_argument on a bad duration or overlapping steps on one axis.
  void validate() const;
};

/// Hover at (0, 0, -3) while the attitude swings.
ScenarioSpec scenario_hover_orientation(double duration = 60.0);
/// Lateral sinusoids with zero attitude.
ScenarioSpec scenario_translation(double omega_x = 0.5, double omega_y = 0.7, double duration = 60.0);
/// Translation plus attitude swings and staggered acceleration steps.
ScenarioSpec scenario_full_pose(double step_accel = 1.0, double duration = 100.0);

/// "1", "2", "3" or "custom:<path to json>".
ScenarioSpec load_scenario(const std::string& selector, double omega_x = 0.5, double omega_y = 0.7);
ScenarioSpec parse_scenario_json(const std::string& text);

}  // namespace oactl
