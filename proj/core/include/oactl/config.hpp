#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "oactl/controller.hpp"
#include "oactl/signal_chain.hpp"
#include "oactl/types.hpp"

namespace oactl {

/// Validation failure; `field()` is the JSON path of the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ScenarioDefaults {
  double omega_x = 0.5;  // scenario 2 lateral frequencies (rad/s)
  double omega_y = 0.7;
  std::vector<double> sweep_omega_x{0.3, 0.5, 0.7};
  std::vector<double> sweep_omega_y{0.5, 0.7, 0.9};
  double disturbance_accel = 1.0;  // scenario 3 step size (m/s^2)
};

struct SystemConfig {
  MultirotorConfig vehicle;
  ControllerConfig controller;
  ActuatorParams actuator;
  int substeps = 4;
  ScenarioDefaults scenario;
};

/// n motors on a circle of radius l, first on +x_B, alternating spins.
MultirotorConfig regular_multirotor(std::size_t n, double mass, const Mat3& inertia, double arm, double k_t,
                                    double k_d, double omega_min, double omega_max, double tilt_limit);

/// The hexacopter of the bundled configs/hexa_table1.json.
SystemConfig default_config();

/// Parses and validates a JSON config. Units: rpm for rotor speeds, degrees
/// for angles; converted to rad/s and rad.
SystemConfig parse_config(const std::string& json_text);
SystemConfig load_config(const std::string& path);

}  // namespace oactl
