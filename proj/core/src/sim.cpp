#include "oactl/sim.hpp"

#include <algorithm>
#include <limits>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "oactl/model.hpp"

namespace oactl {

namespace {

struct BodyDelta {
  Vec3 p, v;
  Mat3 r;
  Vec3 w;
};

RigidBodyState add(const RigidBodyState& s, const BodyDelta& d, double h) {
  RigidBodyState out;
  out.position = s.position + h * d.p;
  out.velocity = s.velocity + h * d.v;
  out.rotation = s.rotation + h * d.r;
  out.body_rate = s.body_rate + h * d.w;
  return out;
}

ActuatorState lagged(const ActuatorState& x0, const ActuatorState& cmd, double elapsed, double tau) {
  ActuatorState a = x0;
  const double k = 1.0 - std::exp(-elapsed / tau);
  for (std::size_t i = 0; i < a.motors.size(); ++i) {
    auto& m = a.motors[i];
    const auto& c = cmd.motors[i];
    m.alpha += k * (c.alpha - m.alpha);
    m.beta += k * (c.beta - m.beta);
    m.omega += k * (c.omega - m.omega);
  }
  return a;
}

const char* kAxes[3] = {"x", "y", "z"};
const char* kAngles[3] = {"phi", "theta", "psi"};

}  // namespace

Plant::Plant(const MultirotorConfig& vehicle, const ActuatorParams& actuator, int substeps)
    : actuators(hover_actuators(vehicle)), vehicle_(vehicle), actuator_(actuator), substeps_(substeps) {
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  if (!(actuator.time_constant > 0.0)) throw std::invalid_argument("actuator time constant must be positive");
}

Vec3 Plant::acceleration(const Vec3& disturbance_accel) const {
  Disturbance d;
  d.force = vehicle_.mass * disturbance_accel;
  return dynamics_derivative(state, total_wrench(vehicle_, actuators), d, vehicle_).velocity_dot;
}

void Plant::advance(const ActuatorState& command, const Vec3& disturbance_accel, double dt) {
  Disturbance dist;
  dist.force = vehicle_.mass * disturbance_accel;
  const ActuatorState x0 = actuators;
  const double tau = actuator_.time_constant;
  const double h = dt / substeps_;
  auto deriv = [&](const RigidBodyState& s, double elapsed) {
    const RigidBodyDerivative d =
        dynamics_derivative(s, total_wrench(vehicle_, lagged(x0, command, elapsed, tau)), dist, vehicle_);
    return BodyDelta{d.position_dot, d.velocity_dot, d.rotation_dot, d.body_rate_dot};
  };
  for (int k = 0; k < substeps_; ++k) {
    const double t0 = k * h;
    const BodyDelta k1 = deriv(state, t0);
    const BodyDelta k2 = deriv(add(state, k1, 0.5 * h), t0 + 0.5 * h);
    const BodyDelta k3 = deriv(add(state, k2, 0.5 * h), t0 + 0.5 * h);
    const BodyDelta k4 = deriv(add(state, k3, h), t0 + h);
    BodyDelta sum{k1.p + 2 * k2.p + 2 * k3.p + k4.p, k1.v + 2 * k2.v + 2 * k3.v + k4.v,
                  k1.r + 2 * k2.r + 2 * k3.r + k4.r, k1.w + 2 * k2.w + 2 * k3.w + k4.w};
    state = add(state, sum, h / 6.0);
    state.rotation = orthonormalize(state.rotation);
  }
  actuators = actuator_lag_step(x0, command, dt, actuator_, vehicle_);
}

std::vector<std::string> Telemetry::columns() const {
  std::vector<std::string> c{"t"};
  auto vec = [&](const std::string& prefix, const char* const* names) {
    for (int i = 0; i < 3; ++i) c.push_back(prefix + "_" + names[i]);
  };
  vec("xi_ref", kAxes);
  vec("xi", kAxes);
  vec("mu_ref", kAngles);
  vec("mu_c", kAngles);
  vec("mu_m", kAngles);
  vec("mu", kAngles);
  for (std::size_t i = 1; i <= motors; ++i) {
    const std::string s = std::to_string(i);
    for (const char* n : {"alpha_cmd_", "beta_cmd_", "omega_cmd_", "alpha_", "beta_", "omega_"}) c.push_back(n + s);
  }
  vec("dfbc", kAxes);
  vec("fbref", kAxes);
  for (const char* n : {"solve_time", "guidance_iterations", "inner_iterations", "active_constraints",
                        "solver_status", "slice_violation"}) {
    c.push_back(n);
  }
  vec("dist", kAxes);
  return c;
}

Metrics compute_metrics(const Telemetry& telemetry, const MultirotorConfig& limits) {
  Metrics m;
  const std::size_t n = telemetry.motors;
  m.saturation_fraction.assign(3 * n, 0.0);
  double sq = 0.0;
  for (const auto& r : telemetry.rows) {
    const double e = (r.xi_ref - r.xi).norm();
    m.max_position_error = std::max(m.max_position_error, e);
    sq += e * e;
    Vec3 att = r.mu - r.mu_c;
    att.z() = wrap_angle(att.z());
    m.max_attitude_error = std::max(m.max_attitude_error, att.cwiseAbs().maxCoeff());
    Vec3 dev = r.mu;
    dev.z() = wrap_angle(dev.z());
    m.max_attitude_deviation = std::max(m.max_attitude_deviation, dev.cwiseAbs().maxCoeff());
    if (r.active_constraints == 0) {
      Vec3 gap = r.mu_c - r.mu_ref;
      gap.z() = wrap_angle(gap.z());
      m.max_free_command_gap = std::max(m.max_free_command_gap, gap.cwiseAbs().maxCoeff());
    }
    for (std::size_t i = 0; i < n && i < limits.motor_count(); ++i) {
      const auto& lim = limits.motors[i];
      const auto& c = r.command[i];
      auto at = [](double v, double lo, double hi) { return v <= lo + 1e-9 || v >= hi - 1e-9; };
      if (at(c.alpha, lim.alpha_min, lim.alpha_max)) m.saturation_fraction[3 * i] += 1.0;
      if (at(c.beta, lim.beta_min, lim.beta_max)) m.saturation_fraction[3 * i + 1] += 1.0;
      if (at(c.omega, lim.omega_min, lim.omega_max)) m.saturation_fraction[3 * i + 2] += 1.0;
    }
    m.max_solve_time = std::max(m.max_solve_time, r.solve_time);
    m.max_guidance_iterations = std::max(m.max_guidance_iterations, r.guidance_iterations);
    m.max_inner_iterations = std::max(m.max_inner_iterations, r.inner_iterations);
    if (r.solver_status != 0) ++m.solver_failures;
    m.max_slice_violation = std::max(m.max_slice_violation, r.slice_violation);
  }
  if (!telemetry.rows.empty()) {
    const double rows = static_cast<double>(telemetry.rows.size());
    m.rms_position_error = std::sqrt(sq / rows);
    for (auto& s : m.saturation_fraction) s /= rows;
  }
  return m;
}

Simulation::Simulation(const MultirotorConfig& model, const ControllerConfig& controller,
                       const ScenarioSpec& scenario, const SimOptions& options,
                       std::shared_ptr<const ZeroTorqueSet> s0)
    : scenario_(scenario),
      options_(options),
      plant_(
          [&] {
            MultirotorConfig p = model;
            p.mass *= options.mass_scale;
            p.inertia *= options.inertia_scale;
            return p;
          }(),
          options.actuator, options.substeps),
      controller_(model, controller, std::move(s0)),
      rng_(scenario.seed),
      dt_(controller.dt) {
  scenario_.validate();
  controller_.set_timing(options.timing);
  telemetry_.motors = model.motor_count();
  total_steps_ = std::lround(scenario_.duration / dt_);
  const long preroll = std::lround(options_.preroll / dt_);
  step_index_ = -preroll;
  t_ = step_index_ * dt_;
  plant_.state.position = scenario_.position(0.0);
  plant_.state.rotation = euler_to_rotation(scenario_.attitude(0.0));
  controller_.initialize(measure());
  telemetry_.rows.reserve(static_cast<std::size_t>(total_steps_));
}

Measurements Simulation::measure() {
  const Vec3 dist = step_index_ >= 0 ? scenario_.disturbance_at(t_) : Vec3::Zero();
  Measurements m;
  m.position = plant_.state.position;
  m.velocity = plant_.state.velocity;
  m.euler = rotation_to_euler(plant_.state.rotation);
  m.body_rate = plant_.state.body_rate;
  m.acceleration = plant_.acceleration(dist);
  m.actuators = plant_.actuators;
  if (scenario_.noise.enabled()) {
    std::normal_distribution<double> unit(0.0, 1.0);
    auto noisy = [&](Vec3& v, double sigma) {
      if (sigma > 0.0) {
        for (int i = 0; i < 3; ++i) v[i] += sigma * unit(rng_);
      }
    };
    noisy(m.position, scenario_.noise.position);
    noisy(m.velocity, scenario_.noise.velocity);
    noisy(m.euler, scenario_.noise.attitude);
    noisy(m.body_rate, scenario_.noise.body_rate);
    noisy(m.acceleration, scenario_.noise.acceleration);
  }
  return m;
}

bool Simulation::done() const { return step_index_ >= total_steps_; }

void Simulation::step() {
  if (done()) throw std::logic_error("simulation already finished");
  const bool recording = step_index_ >= 0;
  const double t_ref = recording ? t_ : 0.0;
  const Vec3 xi_ref = scenario_.position(t_ref);
  const Vec3 mu_ref = scenario_.attitude(t_ref);
  const Vec3 dist = recording ? scenario_.disturbance_at(t_) : Vec3::Zero();

  const Measurements m = measure();
  double best_step = std::numeric_limits<double>::infinity();
  double best_solve = best_step;
  if (options_.timing && recording) {
    for (int k = 1; k < options_.timing_repeats; ++k) {
      FlightController replay = controller_;
      const ControlOutput o = replay.step(m, xi_ref, mu_ref);
      best_step = std::min(best_step, o.step_time);
      best_solve = std::min(best_solve, o.guidance_solve_time);
    }
  }
  ControlOutput out = controller_.step(m, xi_ref, mu_ref);
  if (recording) {
    max_raw_step_time_ = std::max(max_raw_step_time_, out.step_time);
    max_raw_solve_time_ = std::max(max_raw_solve_time_, out.guidance_solve_time);
    out.step_time = std::min(out.step_time, best_step);
    out.guidance_solve_time = std::min(out.guidance_solve_time, best_solve);
    max_step_time_ = std::max(max_step_time_, out.step_time);
  }

  if (recording) {
    TelemetryRow r;
    r.t = t_;
    r.xi_ref = xi_ref;
    r.xi = plant_.state.position;
    r.mu_ref = mu_ref;
    r.mu_c = out.mu_c;
    r.mu_m = out.mu_m;
    r.mu = rotation_to_euler(plant_.state.rotation);
    r.command = out.command.motors;
    r.actuators = plant_.actuators.motors;
    r.delta_force = out.delta_force;
    r.f_b_ref = out.f_b_ref;
    r.solve_time = out.guidance_solve_time;
    r.guidance_iterations = out.guidance_iterations;
    r.inner_iterations = out.inner_iterations;
    r.active_constraints = out.active_constraints;
    r.solver_status = (out.guidance_status != WlsStatus::kOptimal ? 1 : 0) + (out.inner_status != WlsStatus::kOptimal ? 2 : 0);
    r.slice_violation = out.slice_violation;
    r.disturbance = dist;
    telemetry_.rows.push_back(std::move(r));
  }

  plant_.advance(out.command, dist, dt_);
  const auto& s = plant_.state;
  if (!s.position.allFinite() || !s.velocity.allFinite() || !s.rotation.allFinite() || !s.body_rate.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite plant state at t = " << t_;
    throw std::runtime_error(msg.str());
  }
  ++step_index_;
  t_ = step_index_ * dt_;
}

RunResult run_scenario(const ScenarioSpec& scenario, const MultirotorConfig& model, const ControllerConfig& controller,
                       const SimOptions& options, std::shared_ptr<const ZeroTorqueSet> s0) {
  Simulation sim(model, controller, scenario, options, std::move(s0));
  while (!sim.done()) sim.step();
  RunResult r;
  r.telemetry = sim.telemetry();
  r.metrics = compute_metrics(r.telemetry, model);
  return r;
}

void write_csv(std::ostream& out, const Telemetry& telemetry) {
  const auto cols = telemetry.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  char buf[32];
  std::string line;
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    line += ',';
    line += buf;
  };
  auto vec = [&](const Vec3& v) {
    for (int i = 0; i < 3; ++i) num(v[i]);
  };
  for (const auto& r : telemetry.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.t);
    line = buf;
    vec(r.xi_ref);
    vec(r.xi);
    vec(r.mu_ref);
    vec(r.mu_c);
    vec(r.mu_m);
    vec(r.mu);
    for (std::size_t i = 0; i < telemetry.motors; ++i) {
      num(r.command[i].alpha);
      num(r.command[i].beta);
      num(r.command[i].omega);
      num(r.actuators[i].alpha);
      num(r.actuators[i].beta);
      num(r.actuators[i].omega);
    }
    vec(r.delta_force);
    vec(r.f_b_ref);
    num(r.solve_time);
    num(r.guidance_iterations);
    num(r.inner_iterations);
    num(r.active_constraints);
    num(r.solver_status);
    num(r.slice_violation);
    vec(r.disturbance);
    line += '\n';
    out << line;
  }
  if (!out) throw std::runtime_error("telemetry write failed");
}

void write_csv(const std::string& path, const Telemetry& telemetry) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(out, telemetry);
}

Telemetry read_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("telemetry CSV is empty");
  const std::size_t fields = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  constexpr std::size_t kFixed = 34;
  if (fields < kFixed || (fields - kFixed) % 6 != 0) throw std::runtime_error("telemetry CSV: unexpected column count");
  Telemetry t;
  t.motors = (fields - kFixed) / 6;
  if (header != [&] {
        std::string h;
        const auto cols = t.columns();
        for (std::size_t i = 0; i < cols.size(); ++i) h += (i ? "," : "") + cols[i];
        return h;
      }()) {
    throw std::runtime_error("telemetry CSV: header does not match the column layout");
  }
  std::string line;
  std::vector<double> v(fields);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const char* p = line.c_str();
    for (std::size_t k = 0; k < fields; ++k) {
      char* end = nullptr;
      v[k] = std::strtod(p, &end);
      if (end == p) throw std::runtime_error("telemetry CSV: bad number on line " + std::to_string(line_no));
      p = end;
      if (k + 1 < fields) {
        if (*p != ',') throw std::runtime_error("telemetry CSV: missing field on line " + std::to_string(line_no));
        ++p;
      }
    }
    std::size_t k = 0;
    auto vec = [&] {
      Vec3 x(v[k], v[k + 1], v[k + 2]);
      k += 3;
      return x;
    };
    TelemetryRow r;
    r.t = v[k++];
    r.xi_ref = vec();
    r.xi = vec();
    r.mu_ref = vec();
    r.mu_c = vec();
    r.mu_m = vec();
    r.mu = vec();
    r.command.resize(t.motors);
    r.actuators.resize(t.motors);
    for (std::size_t i = 0; i < t.motors; ++i) {
      r.command[i].alpha = v[k++];
      r.command[i].beta = v[k++];
      r.command[i].omega = v[k++];
      r.actuators[i].alpha = v[k++];
      r.actuators[i].beta = v[k++];
      r.actuators[i].omega = v[k++];
    }
    r.delta_force = vec();
    r.f_b_ref = vec();
    r.solve_time = v[k++];
    r.guidance_iterations = static_cast<int>(v[k++]);
    r.inner_iterations = static_cast<int>(v[k++]);
    r.active_constraints = static_cast<int>(v[k++]);
    r.solver_status = static_cast<int>(v[k++]);
    r.slice_violation = v[k++];
    r.disturbance = vec();
    t.rows.push_back(std::move(r));
  }
  return t;
}

Telemetry read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

}  // namespace oactl
