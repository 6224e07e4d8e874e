#include "oactl/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "oactl/model.hpp"

namespace oactl {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kRpm = 2.0 * std::numbers::pi / 60.0;

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  Reader child(const std::string& key) const {
    const std::string p = join(key);
    if (!has(key)) throw ConfigError(p, "missing");
    if (!j_.at(key).is_object()) throw ConfigError(p, "expected an object");
    return Reader(j_.at(key), p);
  }

  double number(const std::string& key) const {
    const std::string p = join(key);
    if (!has(key)) throw ConfigError(p, "missing");
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(p, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(p, "must be finite");
    return x;
  }

  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  double positive(const std::string& key) const {
    const double x = number(key);
    if (!(x > 0.0)) throw ConfigError(join(key), "must be positive");
    return x;
  }

  double positive(const std::string& key, double fallback) const { return has(key) ? positive(key) : fallback; }

  std::vector<double> numbers(const std::string& key, std::size_t size) const {
    const std::string p = join(key);
    if (!has(key)) throw ConfigError(p, "missing");
    const json& v = j_.at(key);
    if (!v.is_array() || (size != 0 && v.size() != size)) {
      throw ConfigError(p, "expected an array of " + (size ? std::to_string(size) : std::string("any")) + " numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(p + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const json& raw() const { return j_; }

 private:
  const json& j_;
  std::string path_;
};

FirstOrderParams block(const Reader& r, const std::string& key, const FirstOrderParams& fallback) {
  if (!r.has(key)) return fallback;
  const Reader b = r.child(key);
  FirstOrderParams p;
  p.gain = b.positive("k");
  p.zero = b.positive("z", 1.0);
  p.pole = b.number("p", p.zero);
  if (p.pole < 0.0) throw ConfigError(b.join("p"), "must be non-negative");
  return p;
}

void check_loops(const ControllerConfig& c) {
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("gains", e.what());
  }
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

MultirotorConfig regular_multirotor(std::size_t n, double mass, const Mat3& inertia, double arm, double k_t,
                                    double k_d, double omega_min, double omega_max, double tilt_limit) {
  MultirotorConfig c;
  c.mass = mass;
  c.inertia = inertia;
  c.k_t = k_t;
  c.k_d = k_d;
  for (std::size_t i = 0; i < n; ++i) {
    const double zeta = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    MotorSpec m;
    m.position = Vec3(arm * std::cos(zeta), arm * std::sin(zeta), 0.0);
    m.spin = (i % 2 == 0) ? 1 : -1;
    m.alpha_min = m.beta_min = -tilt_limit;
    m.alpha_max = m.beta_max = tilt_limit;
    m.omega_min = omega_min;
    m.omega_max = omega_max;
    c.motors.push_back(m);
  }
  return c;
}

SystemConfig default_config() {
  SystemConfig s;
  s.vehicle = regular_multirotor(6, 0.6656, Vec3(0.0041, 0.0048, 0.0599).asDiagonal(), 0.15, 1.14e-4, 1.14e-6, 0.0,
                                 2000.0 * kRpm, 40.0 * kDeg);
  return s;
}

SystemConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<root>", "expected an object");
  const Reader top(root, "");
  SystemConfig s = default_config();

  // Vehicle.
  const Reader v = top.child("vehicle");
  const double mass = v.positive("m");
  const auto inertia = v.numbers("I_B", 3);
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(inertia[i] > 0.0)) throw ConfigError(v.join("I_B") + "[" + std::to_string(i) + "]", "must be positive");
  }
  const double arm = v.positive("l");
  const double k_t = v.positive("k_t");
  const double k_d = v.number("k_d");
  if (k_d < 0.0) throw ConfigError(v.join("k_d"), "must be non-negative");
  const double w_min = v.number("omega_min_rpm", 0.0) * kRpm;
  const double w_max = v.positive("omega_max_rpm") * kRpm;
  if (w_min < 0.0 || w_min >= w_max) throw ConfigError(v.join("omega_min_rpm"), "must lie in [0, omega_max_rpm)");
  const double tilt = v.number("tilt_limit_deg") * kDeg;
  if (tilt < 0.0 || tilt >= 90.0 * kDeg) throw ConfigError(v.join("tilt_limit_deg"), "must lie in [0, 90)");
  const double n_raw = v.number("n", 6.0);
  if (n_raw < 1.0 || n_raw != std::floor(n_raw)) throw ConfigError(v.join("n"), "must be a positive integer");
  s.vehicle = regular_multirotor(static_cast<std::size_t>(n_raw), mass, Vec3(inertia[0], inertia[1], inertia[2]).asDiagonal(),
                                 arm, k_t, k_d, w_min, w_max, tilt);
  s.vehicle.gravity = v.positive("g", 9.81);
  if (v.has("gamma_deg")) {
    const auto g = v.numbers("gamma_deg", s.vehicle.motor_count());
    for (std::size_t i = 0; i < g.size(); ++i) s.vehicle.motors[i].gamma = g[i] * kDeg;
  }
  if (mass * s.vehicle.gravity >= static_cast<double>(s.vehicle.motor_count()) * k_t * w_max * w_max) {
    throw ConfigError(v.join("m"), "weight exceeds total thrust");
  }

  // Signal chain.
  if (top.has("signals")) {
    const Reader sig = top.child("signals");
    s.controller.dt = sig.positive("dt", s.controller.dt);
    s.controller.filter.natural_frequency = sig.positive("omega_n", s.controller.filter.natural_frequency);
    s.controller.filter.damping = sig.positive("xi_n", s.controller.filter.damping);
    s.actuator.time_constant = 1.0 / sig.positive("tau_ac_inv", 1.0 / s.actuator.time_constant);
    const double sub = sig.number("substeps", s.substeps);
    if (sub < 1.0 || sub != std::floor(sub)) throw ConfigError(sig.join("substeps"), "must be a positive integer");
    s.substeps = static_cast<int>(sub);
    s.controller.filter.dt = s.controller.dt;
    try {
      s.controller.filter.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("signals", e.what());
    }
  }

  // Gains.
  if (top.has("gains")) {
    const Reader g = top.child("gains");
    if (g.has("outer")) {
      const Reader o = g.child("outer");
      s.controller.outer.position = block(o, "K_xi", s.controller.outer.position);
      s.controller.outer.velocity = block(o, "K_v", s.controller.outer.velocity);
    }
    if (g.has("inner")) {
      const Reader i = g.child("inner");
      s.controller.inner.attitude = block(i, "K_mu", s.controller.inner.attitude);
      s.controller.inner.rate = block(i, "K_Omega", s.controller.inner.rate);
    }
    s.controller.min_bandwidth_ratio = g.number("min_bandwidth_ratio", s.controller.min_bandwidth_ratio);
  }

  // Weights.
  if (top.has("weights")) {
    const Reader w = top.child("weights");
    auto& gw = s.controller.guidance_weights;
    gw.gamma_opt = w.positive("gamma_opt", gw.gamma_opt);
    if (w.has("W_u")) {
      const auto d = w.numbers("W_u", 6);
      for (int i = 0; i < 6; ++i) gw.w_u[i] = d[static_cast<std::size_t>(i)];
    }
    if (w.has("W_v")) {
      const auto d = w.numbers("W_v", 3);
      for (int i = 0; i < 3; ++i) gw.w_v[i] = d[static_cast<std::size_t>(i)];
    }
    if (w.has("force_target")) {
      const json& ft = w.raw().at("force_target");
      const std::string name = ft.is_string() ? ft.get<std::string>() : "";
      if (name == "attitude_consistent") gw.force_target = ForceTarget::kAttitudeConsistent;
      else if (name == "zero") gw.force_target = ForceTarget::kZero;
      else if (name == "measured") gw.force_target = ForceTarget::kMeasured;
      else throw ConfigError(w.join("force_target"), "expected attitude_consistent, zero or measured");
    }
    try {
      gw.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("weights", e.what());
    }
    if (w.has("inner")) {
      const Reader in = w.child("inner");
      auto& iw = s.controller.inner_weights;
      iw.gamma_in = in.positive("gamma_in", iw.gamma_in);
      if (in.has("W_nu")) {
        const auto d = in.numbers("W_nu", 6);
        for (int i = 0; i < 6; ++i) iw.w_nu[i] = d[static_cast<std::size_t>(i)];
      }
      iw.w_tilt = in.positive("W_a_tilt", iw.w_tilt);
      iw.w_omega = in.positive("W_a_omega", iw.w_omega);
      if (in.has("prefer_uniform")) {
        const json& pu = in.raw().at("prefer_uniform");
        if (!pu.is_boolean()) throw ConfigError(in.join("prefer_uniform"), "expected true or false");
        iw.prefer_uniform = pu.get<bool>();
      }
      iw.max_tilt_step = in.positive("max_tilt_step_deg", iw.max_tilt_step / kDeg) * kDeg;
      iw.max_omega_step = in.positive("max_omega_step_rpm", iw.max_omega_step / kRpm) * kRpm;
      try {
        iw.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError("weights.inner", e.what());
      }
    }
  }

  // Attitude limits, degrees; null means unlimited.
  if (top.has("limits")) {
    const Reader l = top.child("limits");
    if (l.has("attitude_deg")) {
      const json& a = l.raw().at("attitude_deg");
      if (!a.is_array() || a.size() != 3) throw ConfigError(l.join("attitude_deg"), "expected 3 entries");
      for (int i = 0; i < 3; ++i) {
        const json& e = a[static_cast<std::size_t>(i)];
        const double lim = e.is_null() ? std::numeric_limits<double>::infinity() : (e.is_number() ? e.get<double>() * kDeg : -1.0);
        if (!(lim > 0.0)) throw ConfigError(l.join("attitude_deg") + "[" + std::to_string(i) + "]", "expected a positive number or null");
        s.controller.attitude_limits.lower[i] = -lim;
        s.controller.attitude_limits.upper[i] = lim;
      }
    }
    if (l.has("attitude_step_deg")) {
      s.controller.attitude_limits.max_step = Vec3::Constant(l.positive("attitude_step_deg") * kDeg);
    }
  }

  if (top.has("force_set")) {
    const Reader f = top.child("force_set");
    if (f.has("grid")) {
      const auto g = f.numbers("grid", 2);
      if (g[0] < 3 || g[1] < 3) throw ConfigError(f.join("grid"), "must be at least 3x3");
      s.controller.grid = {static_cast<int>(g[0]), static_cast<int>(g[1])};
    }
    const double sub = f.number("icosphere_subdivisions", s.controller.icosphere_subdivisions);
    if (sub < 1.0 || sub > 4.0) throw ConfigError(f.join("icosphere_subdivisions"), "must lie in [1, 4]");
    s.controller.icosphere_subdivisions = static_cast<int>(sub);
    s.controller.force_margin = f.number("margin_N", s.controller.force_margin);
    if (s.controller.force_margin < 0.0) throw ConfigError(f.join("margin_N"), "must be non-negative");
  }

  if (top.has("scenario")) {
    const Reader sc = top.child("scenario");
    s.scenario.omega_x = sc.positive("omega_x", s.scenario.omega_x);
    s.scenario.omega_y = sc.positive("omega_y", s.scenario.omega_y);
    if (sc.has("sweep_omega_x")) s.scenario.sweep_omega_x = sc.numbers("sweep_omega_x", 0);
    if (sc.has("sweep_omega_y")) s.scenario.sweep_omega_y = sc.numbers("sweep_omega_y", 0);
    s.scenario.disturbance_accel = sc.number("disturbance_accel", s.scenario.disturbance_accel);
  }

  check_loops(s.controller);
  return s;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace oactl
