#include "oactl/force_sets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>

#include "oactl/linprog.hpp"
#include "oactl/model.hpp"

namespace oactl {

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v;
  if (count <= 1 || hi <= lo) {
    v.push_back(0.5 * (lo + hi));
    return v;
  }
  for (int i = 0; i < count; ++i) v.push_back(lo + (hi - lo) * i / (count - 1));
  return v;
}

void push_unique(std::vector<Vec3>& pts, const Vec3& p) {
  for (const auto& q : pts) {
    if ((q - p).norm() < 1e-12) return;
  }
  pts.push_back(p);
}

struct SupportSolution {
  double value;
  Vec3 point;
};

// One LP over convex-combination weights of every motor's vertices.
std::optional<SupportSolution> support_lp(const MultirotorConfig& config, const std::vector<MotorForceSet>& sets,
                                          const std::optional<Vec3>& tau_s, const Vec3& direction) {
  const std::size_t n = sets.size();
  Eigen::Index vars = 0;
  for (const auto& s : sets) vars += static_cast<Eigen::Index>(s.vertices.size());

  LinearProgram lp = LinearProgram::with_variables(vars);
  const Eigen::Index eq_rows = static_cast<Eigen::Index>(n) + (tau_s ? 3 : 0);
  lp.a_eq = Eigen::MatrixXd::Zero(eq_rows, vars);
  lp.b_eq = Eigen::VectorXd::Zero(eq_rows);
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Mat3 torque_map = motor_torque_map(config, i);
    for (const auto& v : sets[i].vertices) {
      lp.c[col] = -direction.dot(v);
      lp.a_eq(static_cast<Eigen::Index>(i), col) = 1.0;
      if (tau_s) lp.a_eq.block<3, 1>(static_cast<Eigen::Index>(n), col) = torque_map * v;
      ++col;
    }
    lp.b_eq[static_cast<Eigen::Index>(i)] = 1.0;
  }
  if (tau_s) lp.b_eq.tail<3>() = *tau_s;

  const LpResult r = solve_lp(lp);
  if (r.status != LpStatus::kOptimal) return std::nullopt;
  Vec3 point = Vec3::Zero();
  col = 0;
  for (const auto& s : sets) {
    for (const auto& v : s.vertices) point += r.x[col++] * v;
  }
  return SupportSolution{-r.objective, point};
}

std::vector<MotorForceSet> all_motor_sets(const MultirotorConfig& config, TiltGrid grid) {
  std::vector<MotorForceSet> sets;
  for (std::size_t i = 0; i < config.motor_count(); ++i) sets.push_back(motor_force_polytope(config, i, grid));
  return sets;
}

Polytope build_from_supports(const MultirotorConfig& config, const std::optional<Vec3>& tau_s,
                             const ForceSetOptions& options) {
  if (options.directions.empty()) throw std::invalid_argument("force set: no directions");
  const auto sets = all_motor_sets(config, options.grid);
  const auto m = static_cast<Eigen::Index>(options.directions.size());
  Eigen::MatrixXd a(m, 3);
  Eigen::VectorXd b(m);
  std::vector<Eigen::Vector3d> points;
  Vec3 centroid = Vec3::Zero();
  for (Eigen::Index k = 0; k < m; ++k) {
    const Vec3 d = options.directions[static_cast<std::size_t>(k)].normalized();
    const auto s = support_lp(config, sets, tau_s, d);
    if (!s) return Polytope::empty_set(3);
    a.row(k) = d.transpose();
    b[k] = s->value;
    centroid += s->point;
    points.push_back(s->point);
  }
  if (options.approximation == SetApproximation::kInner) return convex_hull(points, 1e-9);
  centroid /= static_cast<double>(m);
  return Polytope::from_halfspaces(std::move(a), std::move(b), centroid);
}

}  // namespace

MotorForceSet motor_force_polytope(const MultirotorConfig& config, std::size_t motor, TiltGrid grid) {
  if (grid.n_alpha < 3 || grid.n_beta < 3) throw std::invalid_argument("motor_force_polytope: grid must be at least 3x3");
  const auto& spec = config.motors.at(motor);
  const double f_max = config.k_t * spec.omega_max * spec.omega_max;
  const double f_min = config.k_t * spec.omega_min * spec.omega_min;

  MotorForceSet set;
  if (f_min <= 0.0) set.vertices.push_back(Vec3::Zero());
  for (double alpha : linspace(spec.alpha_min, spec.alpha_max, grid.n_alpha)) {
    for (double beta : linspace(spec.beta_min, spec.beta_max, grid.n_beta)) {
      const Vec3 dir = thrust_direction(alpha, beta, spec.gamma);
      push_unique(set.vertices, f_max * dir);
      if (f_min > 0.0) push_unique(set.vertices, f_min * dir);
    }
  }
  return set;
}

std::vector<Vec3> icosphere_directions(int subdivisions) {
  std::vector<Vec3> v;
  v.emplace_back(0, 0, 1);
  const double z = 1.0 / std::sqrt(5.0);
  const double rho = 2.0 / std::sqrt(5.0);
  for (int k = 0; k < 5; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 5.0;
    v.emplace_back(rho * std::cos(t), rho * std::sin(t), z);
  }
  for (int k = 0; k < 5; ++k) {
    const double t = 2.0 * std::numbers::pi * (k + 0.5) / 5.0;
    v.emplace_back(rho * std::cos(t), rho * std::sin(t), -z);
  }
  v.emplace_back(0, 0, -1);

  std::vector<std::array<int, 3>> faces;
  for (int k = 0; k < 5; ++k) {
    const int u0 = 1 + k, u1 = 1 + (k + 1) % 5;
    const int l0 = 6 + k, l1 = 6 + (k + 1) % 5;
    faces.push_back({0, u0, u1});
    faces.push_back({u0, l0, u1});
    faces.push_back({u1, l0, l1});
    faces.push_back({11, l1, l0});
  }

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
      const auto key = std::minmax(i, j);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(j)]).normalized());
      const int id = static_cast<int>(v.size() - 1);
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& f : faces) {
      const int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
  }
  return v;
}

std::optional<double> feasible_force_support(const MultirotorConfig& config, const Vec3& tau_s,
                                             const Vec3& direction, TiltGrid grid) {
  const auto s = support_lp(config, all_motor_sets(config, grid), tau_s, direction);
  if (!s) return std::nullopt;
  return s->value;
}

double attainable_force_support(const MultirotorConfig& config, const Vec3& direction, TiltGrid grid) {
  const auto s = support_lp(config, all_motor_sets(config, grid), std::nullopt, direction);
  if (!s) throw std::logic_error("attainable force support LP failed");
  return s->value;
}

Polytope feasible_force_set(const MultirotorConfig& config, const Vec3& tau_s, const ForceSetOptions& options) {
  return build_from_supports(config, tau_s, options);
}

Polytope attainable_force_set(const MultirotorConfig& config, const ForceSetOptions& options) {
  if (!options.exact_motor_caps) return build_from_supports(config, std::nullopt, options);
  if (options.directions.empty()) throw std::invalid_argument("force set: no directions");
  const auto m = static_cast<Eigen::Index>(options.directions.size());
  Eigen::MatrixXd a(m, 3);
  Eigen::VectorXd b(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Vec3 d = options.directions[static_cast<std::size_t>(k)].normalized();
    a.row(k) = d.transpose();
    b[k] = 0.0;
    for (std::size_t i = 0; i < config.motor_count(); ++i) b[k] += motor_force_support(config, i, d);
  }
  // Hover thrust direction scaled to half the total is always inside.
  Vec3 inside = Vec3::Zero();
  for (std::size_t i = 0; i < config.motor_count(); ++i) {
    inside += 0.5 * config.max_motor_thrust(i) * thrust_direction(0.0, 0.0, config.motors[i].gamma);
  }
  return Polytope::from_halfspaces(std::move(a), std::move(b), inside);
}

double motor_force_support(const MultirotorConfig& config, std::size_t motor, const Vec3& direction) {
  const auto& spec = config.motors.at(motor);
  // d . dir = -dx sb + cb (dy sa - dz ca). Both factors are sinusoids in one
  // angle; on an interval the maximum is the clamped peak or an endpoint.
  auto peak = [](double s, double c, double lo, double hi) {
    double best = -std::numeric_limits<double>::infinity();
    for (double x : {std::clamp(std::atan2(s, c), lo, hi), lo, hi}) best = std::max(best, s * std::sin(x) + c * std::cos(x));
    return best;
  };
  const double k = peak(direction.y(), -direction.z(), spec.alpha_min, spec.alpha_max);
  const double g = peak(-direction.x(), k, spec.beta_min, spec.beta_max);
  const double w = g > 0.0 ? spec.omega_max : spec.omega_min;
  return config.k_t * w * w * g;
}

MotorInversion invert_motor_force(const MultirotorConfig& config, std::size_t motor, const Vec3& force) {
  const auto& spec = config.motors.at(motor);
  MotorInversion inv;
  const double f = force.norm();
  inv.omega = std::sqrt(f / config.k_t);
  constexpr double tol = 1e-9;
  if (f < 1e-12) {
    inv.within_limits = spec.omega_min <= tol;
    return inv;
  }
  // gamma spins the motor about its own axis and leaves the direction alone.
  const Vec3 dir = force / f;
  inv.beta = std::asin(std::clamp(-dir.x(), -1.0, 1.0));
  inv.alpha = std::atan2(dir.y(), -dir.z());
  inv.within_limits = inv.alpha >= spec.alpha_min - tol && inv.alpha <= spec.alpha_max + tol &&
                      inv.beta >= spec.beta_min - tol && inv.beta <= spec.beta_max + tol &&
                      inv.omega >= spec.omega_min - tol && inv.omega <= spec.omega_max + tol;
  return inv;
}

}  // namespace oactl
