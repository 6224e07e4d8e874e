#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Core>

#include "oactl/types.hpp"
#include "oactl/wls.hpp"

namespace oactl::oracles {

/// Random bounded WLS instance with a known feasible point. n <= max_n
/// variables, p <= max_p general rows, some bounds infinite.
WlsProblem random_wls_problem(std::mt19937_64& rng, int max_n = 5, int max_p = 6);

struct WlsSuiteResult {
  int problems = 0;
  int failures = 0;
  double max_error = 0.0;  // inf-norm of x_solver - x_oracle
  double seconds = 0.0;
};

/// Active-set solver against exhaustive active-set enumeration.
WlsSuiteResult run_wls_suite(int count, std::uint64_t seed, double tol = 1e-6);

/// Central differences of f at x, one column per coordinate.
Eigen::MatrixXd central_difference(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6);

/// ||J - J_fd||_F / ||J_fd||_F.
double relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric);

struct JacobianCheck {
  int points = 0;
  double max_relative_error = 0.0;
};

JacobianCheck check_effectiveness_matrix(int points, std::uint64_t seed);
JacobianCheck check_actuator_jacobian(const MultirotorConfig& config, int points, std::uint64_t seed);

/// Uniformly random tilts and speeds within every motor's limits.
ActuatorState random_actuator_state(const MultirotorConfig& config, std::mt19937_64& rng);

struct ContainmentCheck {
  int samples = 0;
  int outside = 0;
  double worst_excess = 0.0;  // max over samples of max(A f - b)
  double tol = 0.0;
};

/// Forces of random admissible actuator states against the exact-cap AFS.
ContainmentCheck check_afs_containment(const MultirotorConfig& config, int samples, std::uint64_t seed);

}  // namespace oactl::oracles
