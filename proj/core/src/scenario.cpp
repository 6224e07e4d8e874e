#include "oactl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace oactl {

using nlohmann::json;

Vec3 SinusoidReference::operator()(double t) const {
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = offset[i] + amplitude[i] * std::sin(frequency[i] * t + phase[i]);
  return v;
}

Vec3 ScenarioSpec::disturbance_at(double t) const {
  Vec3 a = Vec3::Zero();
  for (const auto& d : disturbances) {
    if (t >= d.t_start && t < d.t_end) a += d.acceleration;
  }
  return a;
}

void ScenarioSpec::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("scenario duration must be positive");
  for (const auto& d : disturbances) {
    if (!(d.t_end > d.t_start)) throw std::invalid_argument("disturbance step must end after it starts");
  }
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<std::pair<double, double>> spans;
    for (const auto& d : disturbances) {
      if (d.acceleration[axis] != 0.0) spans.emplace_back(d.t_start, d.t_end);
    }
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].first < spans[i - 1].second) throw std::invalid_argument("disturbance steps overlap on one axis");
    }
  }
}

ScenarioSpec scenario_hover_orientation(double duration) {
  ScenarioSpec s;
  s.id = "1";
  s.duration = duration;
  s.position.offset = Vec3(0, 0, -3);
  s.attitude.amplitude = Vec3(0.7, -0.7, -0.35);
  s.attitude.frequency = Vec3(0.2, 0.5, 0.5);
  return s;
}

ScenarioSpec scenario_translation(double omega_x, double omega_y, double duration) {
  ScenarioSpec s;
  s.id = "2";
  s.duration = duration;
  s.position.offset = Vec3(0, 0, -3);
  s.position.amplitude = Vec3(3, 2, 0);
  s.position.frequency = Vec3(omega_x, omega_y, 0);
  return s;
}

ScenarioSpec scenario_full_pose(double step_accel, double duration) {
  ScenarioSpec s = scenario_translation(0.5, 0.7, duration);
  s.id = "3";
  s.attitude.amplitude = Vec3(0.53, -0.35, 0);
  s.attitude.frequency = Vec3(0.2, 0.5, 0);
  const double a = step_accel;
  s.disturbances = {{10, 20, Vec3(a, 0, 0)}, {30, 40, Vec3(0, a, 0)}, {50, 60, Vec3(0, 0, a)},
                    {70, 80, Vec3(-a, 0, 0)}};
  return s;
}

namespace {

Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument(path + ": expected an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw std::invalid_argument(path + ": expected numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

SinusoidReference sinusoid(const json& j, const std::string& path) {
  SinusoidReference r;
  if (j.contains("offset")) r.offset = vec3(j["offset"], path + ".offset");
  if (j.contains("amplitude")) r.amplitude = vec3(j["amplitude"], path + ".amplitude");
  if (j.contains("frequency")) r.frequency = vec3(j["frequency"], path + ".frequency");
  if (j.contains("phase")) r.phase = vec3(j["phase"], path + ".phase");
  return r;
}

}  // namespace

ScenarioSpec parse_scenario_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  ScenarioSpec s;
  s.id = j.value("id", std::string("custom"));
  s.duration = j.value("duration", 60.0);
  s.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("position")) s.position = sinusoid(j["position"], "position");
  if (j.contains("attitude")) s.attitude = sinusoid(j["attitude"], "attitude");
  if (j.contains("disturbances")) {
    std::size_t k = 0;
    for (const auto& d : j["disturbances"]) {
      const std::string path = "disturbances[" + std::to_string(k++) + "]";
      DisturbanceStep step;
      step.t_start = d.at("t_start").get<double>();
      step.t_end = d.at("t_end").get<double>();
      step.acceleration = vec3(d.at("acceleration"), path + ".acceleration");
      s.disturbances.push_back(step);
    }
  }
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    s.noise.position = n.value("position", 0.0);
    s.noise.velocity = n.value("velocity", 0.0);
    s.noise.attitude = n.value("attitude", 0.0);
    s.noise.body_rate = n.value("body_rate", 0.0);
    s.noise.acceleration = n.value("acceleration", 0.0);
  }
  s.validate();
  return s;
}

ScenarioSpec load_scenario(const std::string& selector, double omega_x, double omega_y) {
  if (selector == "1") return scenario_hover_orientation();
  if (selector == "2") return scenario_translation(omega_x, omega_y);
  if (selector == "3") return scenario_full_pose();
  const std::string prefix = "custom:";
  if (selector.rfind(prefix, 0) == 0) {
    const std::string path = selector.substr(prefix.size());
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_json(ss.str());
  }
  throw std::invalid_argument("unknown scenario '" + selector + "' (expected 1, 2, 3 or custom:<file>)");
}

}  // namespace oactl
