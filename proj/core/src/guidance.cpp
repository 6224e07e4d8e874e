#include "oactl/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <Eigen/Geometry>

#include "oactl/model.hpp"

namespace oactl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat3 rx(double a) { return euler_to_rotation(Vec3(a, 0, 0)); }
Mat3 ry(double a) { return euler_to_rotation(Vec3(0, a, 0)); }
Mat3 rz(double a) { return euler_to_rotation(Vec3(0, 0, a)); }

}  // namespace

OuterLinearLaw::OuterLinearLaw(const OuterGains& gains, double dt)
    : position_(gains.position, dt, 3), velocity_(gains.velocity, dt, 3) {}

Vec3 OuterLinearLaw::step(const Vec3& xi_ref, const Vec3& xi_m, const Vec3& v_m) {
  const Eigen::VectorXd v_ref = position_.step(xi_ref - xi_m);
  return velocity_.step(v_ref - v_m);
}

void OuterLinearLaw::reset() {
  position_.reset();
  velocity_.reset();
}

void AllocationWeights::validate() const {
  if (!(gamma_opt > 0.0)) throw std::invalid_argument("gamma_opt must be positive");
  if (!(w_u.array() > 0.0).all()) throw std::invalid_argument("W_u entries must be positive");
  if (!(w_v.array() > 0.0).all()) throw std::invalid_argument("W_v entries must be positive");
}

AttitudeLimits::AttitudeLimits() {
  const double lim = 75.0 * std::numbers::pi / 180.0;
  lower = Vec3(-lim, -lim, -kInf);
  upper = Vec3(lim, lim, kInf);
}

Mat36 effectiveness_matrix(const Vec6& u_xi) {
  const Vec3 f = u_xi.head<3>();
  const double phi = u_xi[3], theta = u_xi[4], psi = u_xi[5];
  const Mat3 r = euler_to_rotation(Vec3(phi, theta, psi));
  Mat36 g;
  g.leftCols<3>() = r;
  g.col(3) = Vec3::UnitX().cross(r * f);
  g.col(4) = rx(phi) * skew(Vec3::UnitY()) * ry(theta) * rz(psi) * f;
  g.col(5) = r * Vec3::UnitZ().cross(f);
  return g;
}

Vec3 reference_body_force(double mass, const Vec3& delta_xi_ddot, const Mat3& r_m, const Vec3& f_b_m) {
  const Vec3 f_w_ref = mass * delta_xi_ddot + r_m * f_b_m;
  return r_m.transpose() * f_w_ref;
}

ZeroTorqueSet::ZeroTorqueSet(Polytope p) : polytope(std::move(p)) {
  if (polytope.empty()) throw std::invalid_argument("S(0) is empty: the vehicle cannot hover");
  const auto range = oactl::z_range(polytope);
  if (!range) throw std::invalid_argument("S(0) has no finite z-range");
  z_range = *range;
}

GuidanceConstraints build_constraints(const ZeroTorqueSet& s0, const Vec3& f_b_ref, const Vec3& f_b_m,
                                      const Vec3& mu_m, const AttitudeLimits& limits) {
  GuidanceConstraints out;
  const double span = s0.z_range.max - s0.z_range.min;
  const double margin = 0.01 * span;
  const double lo = s0.z_range.min + margin;
  const double hi = s0.z_range.max - margin;
  out.slice_z = f_b_ref.z();
  if (out.slice_z < lo || out.slice_z > hi) {
    out.slice_z = std::clamp(out.slice_z, lo, hi);
    out.clamped = true;
  }
  out.slice = plane_slice(s0.polytope, out.slice_z);
  if (out.slice.empty()) throw std::logic_error("S(0) slice empty after clamping");

  const Eigen::Index k = out.slice.a.rows();
  out.c = Eigen::MatrixXd::Zero(k, 6);
  out.c.leftCols<2>() = out.slice.a;
  out.d = out.slice.b - out.slice.a * f_b_m.head<2>();

  Vec3 mu_lo = (limits.lower - mu_m).cwiseMax(-limits.max_step);
  const Vec3 mu_hi = (limits.upper - mu_m).cwiseMin(limits.max_step);
  // Outside the limits the step bound can empty the box; keep the closest edge.
  mu_lo = mu_lo.cwiseMin(mu_hi);
  out.lower << -kInf, -kInf, s0.z_range.min - f_b_m.z(), mu_lo;
  out.upper << kInf, kInf, s0.z_range.max - f_b_m.z(), mu_hi;
  return out;
}

Vec3 attitude_error(const Vec3& mu_target, const Vec3& mu_m) {
  Vec3 e = mu_target - mu_m;
  e.z() = wrap_angle(e.z());
  return e;
}

Vec6 preferred_increment(double mass, const Vec3& delta_xi_ddot, const Vec6& u_xi_m, const Vec3& mu_ref,
                         ForceTarget target) {
  Vec6 p;
  const Vec3 e_mu = attitude_error(mu_ref, u_xi_m.tail<3>());
  p.tail<3>() = e_mu;
  switch (target) {
    case ForceTarget::kAttitudeConsistent: {
      // Solve R_m df = m dxi - G_mu e_mu, i.e. the linearized force that
      // yields the commanded acceleration once mu reaches mu_ref.
      const Mat36 g = effectiveness_matrix(u_xi_m);
      p.head<3>() = g.leftCols<3>().transpose() * (mass * delta_xi_ddot - g.rightCols<3>() * e_mu);
      break;
    }
    case ForceTarget::kZero:
      p.head<3>().setZero();
      break;
    case ForceTarget::kMeasured:
      p.head<3>() = u_xi_m.head<3>();
      break;
  }
  return p;
}

WlsProblem guidance_problem(double mass, const Vec3& delta_xi_ddot, const Vec6& u_xi_m, const Vec3& mu_ref,
                            const AllocationWeights& weights, const GuidanceConstraints& constraints) {
  const double sg = std::sqrt(weights.gamma_opt);
  const Mat36 g = effectiveness_matrix(u_xi_m);
  WlsProblem p;
  p.a.resize(9, 6);
  p.b.resize(9);
  p.a.topRows<3>() = sg * weights.w_v.asDiagonal() * g;
  p.b.head<3>() = sg * weights.w_v.asDiagonal() * (mass * delta_xi_ddot);
  p.a.bottomRows<6>() = weights.w_u.asDiagonal();
  p.b.tail<6>() =
      weights.w_u.asDiagonal() * preferred_increment(mass, delta_xi_ddot, u_xi_m, mu_ref, weights.force_target);
  p.lower = constraints.lower;
  p.upper = constraints.upper;
  p.c = constraints.c;
  p.d = constraints.d;
  return p;
}

GuidanceResult guidance_allocation_step(double mass, const Vec3& delta_xi_ddot, const Vec6& u_xi_m,
                                        const Vec3& mu_ref, const AllocationWeights& weights,
                                        const GuidanceConstraints& constraints, WlsSolver& solver,
                                        const std::optional<Vec6>& warm_start) {
  WlsProblem p = guidance_problem(mass, delta_xi_ddot, u_xi_m, mu_ref, weights, constraints);
  if (warm_start) p.warm_start = Eigen::VectorXd(*warm_start);
  GuidanceResult r;
  r.solution = solver.solve(p);
  if (r.solution.status == WlsStatus::kInfeasible) return r;
  r.delta_u = r.solution.x;
  r.delta_force = r.delta_u.head<3>();
  r.mu_c = u_xi_m.tail<3>() + r.delta_u.tail<3>();
  return r;
}

}  // namespace oactl
