#include "oactl_oracles/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "oactl/force_sets.hpp"
#include "oactl/guidance.hpp"
#include "oactl/model.hpp"
#include "oactl/stabilization.hpp"

namespace oactl::oracles {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

WlsProblem random_wls_problem(std::mt19937_64& rng, int max_n, int max_p) {
  std::uniform_int_distribution<int> pick_n(1, max_n);
  std::uniform_int_distribution<int> pick_p(0, max_p);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.05, 1.0);
  std::bernoulli_distribution finite(0.7);
  std::normal_distribution<double> g;

  const int n = pick_n(rng);
  const int p = pick_p(rng);
  const int m = n + 2;
  WlsProblem prob;
  prob.a = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return g(rng); });
  prob.b = Eigen::VectorXd::NullaryExpr(m, [&] { return 2.0 * g(rng); });
  const Eigen::VectorXd x0 = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
  prob.lower.resize(n);
  prob.upper.resize(n);
  for (int i = 0; i < n; ++i) {
    prob.lower[i] = finite(rng) ? x0[i] - pos(rng) : -kInf;
    prob.upper[i] = finite(rng) ? x0[i] + pos(rng) : kInf;
  }
  prob.c = Eigen::MatrixXd::NullaryExpr(p, n, [&] { return g(rng); });
  prob.d = prob.c * x0 + Eigen::VectorXd::NullaryExpr(p, [&] { return 0.5 * pos(rng); });
  return prob;
}

WlsSuiteResult run_wls_suite(int count, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  WlsSolver solver;
  WlsSuiteResult r;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < count; ++k) {
    const WlsProblem prob = random_wls_problem(rng);
    const WlsSolution s = solver.solve(prob);
    const WlsSolution o = brute_force_oracle(prob);
    ++r.problems;
    if (s.status != WlsStatus::kOptimal || o.status != WlsStatus::kOptimal) {
      ++r.failures;
      continue;
    }
    const double err = (s.x - o.x).lpNorm<Eigen::Infinity>();
    r.max_error = std::max(r.max_error, err);
    if (!(err <= tol)) ++r.failures;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Eigen::MatrixXd central_difference(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd j(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    j.col(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

double relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric) {
  const double scale = numeric.norm();
  const double diff = (analytic - numeric).norm();
  return scale > 0.0 ? diff / scale : diff;
}

JacobianCheck check_effectiveness_matrix(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> force(-8.0, 8.0);
  std::uniform_real_distribution<double> angle(-1.2, 1.2);
  std::uniform_real_distribution<double> yaw(-3.0, 3.0);
  JacobianCheck c;
  auto world_force = [](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return euler_to_rotation(u.tail<3>()) * u.head<3>();
  };
  for (int k = 0; k < points; ++k) {
    Vec6 u;
    u << force(rng), force(rng), force(rng), angle(rng), angle(rng), yaw(rng);
    const Eigen::MatrixXd fd = central_difference(world_force, u);
    c.max_relative_error = std::max(c.max_relative_error, relative_error(effectiveness_matrix(u), fd));
    ++c.points;
  }
  return c;
}

ActuatorState random_actuator_state(const MultirotorConfig& config, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ActuatorState a;
  for (const auto& m : config.motors) {
    MotorState s;
    s.alpha = m.alpha_min + (m.alpha_max - m.alpha_min) * u(rng);
    s.beta = m.beta_min + (m.beta_max - m.beta_min) * u(rng);
    s.gamma = m.gamma;
    s.omega = m.omega_min + (m.omega_max - m.omega_min) * u(rng);
    a.motors.push_back(s);
  }
  return a;
}

JacobianCheck check_actuator_jacobian(const MultirotorConfig& config, int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  JacobianCheck c;
  auto wrench = [&config](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return total_wrench(config, ActuatorState::from_vector(u)).stacked();
  };
  for (int k = 0; k < points; ++k) {
    const ActuatorState a = random_actuator_state(config, rng);
    const Eigen::MatrixXd fd = central_difference(wrench, a.to_vector());
    c.max_relative_error = std::max(c.max_relative_error, relative_error(actuator_jacobian(config, a), fd));
    ++c.points;
  }
  return c;
}

ContainmentCheck check_afs_containment(const MultirotorConfig& config, int samples, std::uint64_t seed) {
  ForceSetOptions opts;
  opts.exact_motor_caps = true;
  const Polytope afs = attainable_force_set(config, opts);
  double f_max = 0.0;
  for (std::size_t i = 0; i < config.motor_count(); ++i) f_max = std::max(f_max, config.max_motor_thrust(i));
  std::mt19937_64 rng(seed);
  ContainmentCheck c;
  c.tol = 1e-6 * f_max;
  c.worst_excess = -kInf;
  for (int k = 0; k < samples; ++k) {
    const Vec3 f = total_wrench(config, random_actuator_state(config, rng)).force;
    const double excess = (afs.a * f - afs.b).maxCoeff();
    c.worst_excess = std::max(c.worst_excess, excess);
    if (excess > c.tol) ++c.outside;
    ++c.samples;
  }
  return c;
}

}  // namespace oactl::oracles
