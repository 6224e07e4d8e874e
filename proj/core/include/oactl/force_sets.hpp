#pragma once

#include <vector>

#include "oactl/polytope.hpp"
#include "oactl/types.hpp"

namespace oactl {

/// Vertices (body frame, N) of the convexified force set of one motor.
struct MotorForceSet {
  std::vector<Vec3> vertices;
};

struct TiltGrid {
  int n_alpha = 9;
  int n_beta = 9;
};

/// {0} together with f_max * thrust_dir(alpha, beta) on a uniform tilt grid.
/// With omega_min > 0 the origin is replaced by the same grid at f_min.
MotorForceSet motor_force_polytope(const MultirotorConfig& config, std::size_t motor, TiltGrid grid = {});

/// Unit directions from a subdivided icosahedron with vertices on +-z.
/// 0 -> 12, 1 -> 42, 2 -> 162 directions.
std::vector<Vec3> icosphere_directions(int subdivisions = 2);

/// kOuter: one halfspace per direction at the support value. Contains the
/// set. kInner: convex hull of the support points. Contained in the set.
enum class SetApproximation { kOuter, kInner };

struct ForceSetOptions {
  TiltGrid grid;
  std::vector<Vec3> directions = icosphere_directions(2);
  SetApproximation approximation = SetApproximation::kOuter;
  // Attainable set only: support values of the true (curved) motor sets
  // instead of their grid hulls. Only meaningful with kOuter.
  bool exact_motor_caps = false;
};

/// Exact support of one motor's reachable forces { k_t w^2 dir(alpha, beta) }.
double motor_force_support(const MultirotorConfig& config, std::size_t motor, const Vec3& direction);

/// Support value of S(tau_s) along `direction`: max d . sum_i f_i with each f_i
/// in its motor set and sum_i (skew(d_i) + r c_i I) f_i = tau_s. Returns
/// nullopt when tau_s is unreachable.
std::optional<double> feasible_force_support(const MultirotorConfig& config, const Vec3& tau_s,
                                             const Vec3& direction, TiltGrid grid = {});

/// S(tau_s) as a halfspace polytope, one row per direction. Empty when tau_s
/// cannot be produced.
Polytope feasible_force_set(const MultirotorConfig& config, const Vec3& tau_s,
                            const ForceSetOptions& options = {});

/// Minkowski sum of the motor sets (no torque condition).
Polytope attainable_force_set(const MultirotorConfig& config, const ForceSetOptions& options = {});

/// Support value of the attainable set along `direction`.
double attainable_force_support(const MultirotorConfig& config, const Vec3& direction, TiltGrid grid = {});

/// Recover (alpha, beta, omega) producing a body-frame motor force, if any.
struct MotorInversion {
  double alpha = 0.0;
  double beta = 0.0;
  double omega = 0.0;
  bool within_limits = false;
};
MotorInversion invert_motor_force(const MultirotorConfig& config, std::size_t motor, const Vec3& force);

}  // namespace oactl
