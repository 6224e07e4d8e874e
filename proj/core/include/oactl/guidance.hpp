#pragma once

#include <optional>

#include <limits>

#include <Eigen/Core>

#include "oactl/control_blocks.hpp"
#include "oactl/polytope.hpp"
#include "oactl/types.hpp"
#include "oactl/wls.hpp"

namespace oactl {

using Mat36 = Eigen::Matrix<double, 3, 6>;

/// xi_ddot_ref = K_v(K_p(xi_ref - xi_m) - v_m), per axis.
struct OuterGains {
  FirstOrderParams position = FirstOrderParams::proportional_integral(4.0, 3.0);
  FirstOrderParams velocity = FirstOrderParams::static_gain(10.0);
};

class OuterLinearLaw {
 public:
  OuterLinearLaw() = default;
  OuterLinearLaw(const OuterGains& gains, double dt);

  Vec3 step(const Vec3& xi_ref, const Vec3& xi_m, const Vec3& v_m);
  void reset();

 private:
  FirstOrderBlock position_;
  FirstOrderBlock velocity_;
};

/// What the force part of the regularization term pulls towards.
enum class ForceTarget {
  kAttitudeConsistent,  // the increment that realizes the command at mu_ref
  kZero,                // keep the measured body force
  kMeasured,            // literal (f_bx_m, f_by_m, f_bz_m)
};

struct AllocationWeights {
  double gamma_opt = 1000.0;
  Vec6 w_u = (Vec6() << 1, 1, 1, 10, 10, 100).finished();
  Vec3 w_v = Vec3(100, 100, 10);
  ForceTarget force_target = ForceTarget::kAttitudeConsistent;

  void validate() const;
};

/// Box limits on the commanded Euler angles (rad). Yaw is unlimited by default.
struct AttitudeLimits {
  Vec3 lower;
  Vec3 upper;
  // Per-step bound on |mu_c - mu_m|; keeps the linearized G valid.
  Vec3 max_step = Vec3::Constant(std::numeric_limits<double>::infinity());

  AttitudeLimits();
};

/// d(R(mu) f_b)/d(f_b, mu) evaluated at u_xi = (f_b, mu).
Mat36 effectiveness_matrix(const Vec6& u_xi);

/// f_b_ref = R_m^T (m * delta_xi_ddot + R_m f_b_m).
Vec3 reference_body_force(double mass, const Vec3& delta_xi_ddot, const Mat3& r_m, const Vec3& f_b_m);

/// Constraints on delta u = (delta f_b, delta mu).
struct GuidanceConstraints {
  Eigen::MatrixXd c;  // rows over the full 6-vector; lateral rows only touch x, y
  Eigen::VectorXd d;
  Vec6 lower;
  Vec6 upper;
  Polygon slice;      // absolute lateral force polygon at slice_z
  double slice_z = 0.0;
  bool clamped = false;
};

/// Precomputed data of S(0) shared by every step.
struct ZeroTorqueSet {
  Polytope polytope;
  Interval z_range;

  explicit ZeroTorqueSet(Polytope p);
};

GuidanceConstraints build_constraints(const ZeroTorqueSet& s0, const Vec3& f_b_ref, const Vec3& f_b_m,
                                      const Vec3& mu_m, const AttitudeLimits& limits);

struct GuidanceResult {
  Vec3 delta_force = Vec3::Zero();  // delta f_bc
  Vec3 mu_c = Vec3::Zero();
  Vec6 delta_u = Vec6::Zero();
  WlsSolution solution;
};

/// Stacked least-squares data [sqrt(g) W_v G; W_u], [sqrt(g) W_v m dxi; W_u du_p].
WlsProblem guidance_problem(double mass, const Vec3& delta_xi_ddot, const Vec6& u_xi_m, const Vec3& mu_ref,
                            const AllocationWeights& weights, const GuidanceConstraints& constraints);

/// Preferred increment du_p of the regularization term.
Vec6 preferred_increment(double mass, const Vec3& delta_xi_ddot, const Vec6& u_xi_m, const Vec3& mu_ref,
                         ForceTarget target);

GuidanceResult guidance_allocation_step(double mass, const Vec3& delta_xi_ddot, const Vec6& u_xi_m,
                                        const Vec3& mu_ref, const AllocationWeights& weights,
                                        const GuidanceConstraints& constraints, WlsSolver& solver,
                                        const std::optional<Vec6>& warm_start = std::nullopt);

/// Attitude error with the yaw component wrapped to (-pi, pi].
Vec3 attitude_error(const Vec3& mu_target, const Vec3& mu_m);

}  // namespace oactl
