#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "oactl/config.hpp"
#include "oactl/model.hpp"
#include "oactl/stabilization.hpp"
#include "oactl_oracles/oracles.hpp"

using namespace oactl;

namespace {

const MultirotorConfig& hexa() {
  static const MultirotorConfig c = default_config().vehicle;
  return c;
}

Vec6 wrench_vec(const Wrench& w) {
  Vec6 v;
  v << w.force, w.torque;
  return v;
}

bool within_limits(const ActuatorState& s, const MultirotorConfig& c) {
  for (std::size_t i = 0; i < c.motor_count(); ++i) {
    const auto& m = c.motors[i];
    const auto& a = s.motors[i];
    if (a.alpha < m.alpha_min - 1e-12 || a.alpha > m.alpha_max + 1e-12) return false;
    if (a.beta < m.beta_min - 1e-12 || a.beta > m.beta_max + 1e-12) return false;
    if (a.omega < m.omega_min - 1e-9 || a.omega > m.omega_max + 1e-9) return false;
  }
  return true;
}

}  // namespace

TEST(AttitudeLaw, ZeroErrorGivesZero) {
  AttitudeLinearLaw law(InnerGains{}, 0.002);
  EXPECT_TRUE(law.step(Vec3(0.1, 0.2, 0.3), Vec3(0.1, 0.2, 0.3), Vec3::Zero()).isZero(0.0));
}

TEST(AttitudeLaw, StaticGainsAtLevelAttitude) {
  InnerGains g;
  g.attitude = FirstOrderParams::static_gain(3.0);
  g.rate = FirstOrderParams::static_gain(11.0);
  AttitudeLinearLaw law(g, 0.002);
  const Vec3 e(0.1, -0.05, 0.2), w(0.3, 0.0, -0.1);
  EXPECT_LE((law.step(e, Vec3::Zero(), w) - 11.0 * (3.0 * e - w)).norm(), 1e-12);
}

TEST(AttitudeLaw, YawErrorIsWrapped) {
  InnerGains g;
  g.attitude = FirstOrderParams::static_gain(1.0);
  g.rate = FirstOrderParams::static_gain(1.0);
  AttitudeLinearLaw law(g, 0.002);
  const Vec3 out = law.step(Vec3(0, 0, std::numbers::pi + 0.1), Vec3::Zero(), Vec3::Zero());
  EXPECT_NEAR(out.z(), -std::numbers::pi + 0.1, 1e-12);
}

TEST(InnerIndi, FixedPoint) {
  EXPECT_TRUE(inner_indi_law(Vec3(1, 2, 3), Vec3(1, 2, 3), hexa().inertia).isZero(0.0));
}

TEST(InnerIndi, InertiaProducts) {
  EXPECT_LE((inner_indi_law(Vec3(1, 0, 0), Vec3::Zero(), hexa().inertia) - Vec3(0.0041, 0, 0)).norm(), 1e-15);
  EXPECT_LE((inner_indi_law(Vec3(0, 0, 1), Vec3::Zero(), hexa().inertia) - Vec3(0, 0, 0.0599)).norm(), 1e-15);
}

TEST(ActuatorJacobian, Shape) {
  const auto b = actuator_jacobian(hexa(), hover_actuators(hexa()));
  EXPECT_EQ(b.rows(), 6);
  EXPECT_EQ(b.cols(), 24);
}

TEST(ActuatorJacobian, AngleColumnsVanishWithoutThrust) {
  ActuatorState s = hover_actuators(hexa());
  for (auto& m : s.motors) {
    m.alpha = 0.2;
    m.beta = -0.3;
    m.omega = 0.0;
  }
  const auto b = actuator_jacobian(hexa(), s);
  for (int i = 0; i < 6; ++i) EXPECT_TRUE(b.middleCols(4 * i, 3).isZero(0.0));
}

TEST(ActuatorJacobian, SpeedColumnAtHover) {
  const ActuatorState s = hover_actuators(hexa());
  const auto b = actuator_jacobian(hexa(), s);
  const double w = s.motors[0].omega;
  EXPECT_NEAR(b(2, 3), -2.0 * hexa().k_t * w, 1e-12);
}

TEST(ActuatorJacobian, MatchesFiniteDifferences) {
  const auto r = oracles::check_actuator_jacobian(hexa(), 200, 11);
  EXPECT_EQ(r.points, 200);
  EXPECT_LE(r.max_relative_error, 1e-5);
}

TEST(ActuatorJacobian, QuadraticRemainder) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const ActuatorState s = oracles::random_actuator_state(hexa(), rng);
    const auto b = actuator_jacobian(hexa(), s);
    Eigen::VectorXd dir(24);
    for (int i = 0; i < 24; ++i) dir[i] = (i % 4 == 2) ? 0.0 : g(rng) * ((i % 4 == 3) ? 50.0 : 1.0);
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
      ActuatorState t = s;
      for (int i = 0; i < 6; ++i) {
        t.motors[i].alpha += h * dir[4 * i];
        t.motors[i].beta += h * dir[4 * i + 1];
        t.motors[i].omega += h * dir[4 * i + 3];
      }
      const Vec6 rem = wrench_vec(total_wrench(hexa(), t)) - wrench_vec(total_wrench(hexa(), s)) - b * (h * dir);
      worst = std::max(worst, rem.norm() / (h * h * dir.squaredNorm()));
    }
  }
  // Curvature is bounded by the largest thrust and its second speed partial.
  EXPECT_LT(worst, 10.0);
}

TEST(InnerAllocation, ZeroIncrementAtHoverKeepsState) {
  WlsSolver solver;
  const ActuatorState s = hover_actuators(hexa());
  const auto r = inner_allocation_step(Vec6::Zero(), s, hexa(), InnerAllocationWeights{}, solver);
  ASSERT_EQ(r.solution.status, WlsStatus::kOptimal);
  EXPECT_LE(r.delta.lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(InnerAllocation, ZeroIncrementWithoutUniformTarget) {
  InnerAllocationWeights w;
  w.prefer_uniform = false;
  std::mt19937_64 rng(13);
  WlsSolver solver;
  for (int k = 0; k < 20; ++k) {
    const ActuatorState s = oracles::random_actuator_state(hexa(), rng);
    EXPECT_LE(inner_allocation_step(Vec6::Zero(), s, hexa(), w, solver).delta.lpNorm<Eigen::Infinity>(), 1e-9);
  }
}

TEST(InnerAllocation, SmallIncrementIsRealized) {
  WlsSolver solver;
  const ActuatorState s = hover_actuators(hexa());
  Vec6 dnu;
  dnu << 0.05, -0.03, -0.1, 0.002, -0.001, 0.0005;
  const auto r = inner_allocation_step(dnu, s, hexa(), InnerAllocationWeights{}, solver);
  const Eigen::MatrixXd b = actuator_jacobian(hexa(), s);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(24);
  for (int i = 0; i < 6; ++i) {
    full[4 * i] = r.delta[3 * i];
    full[4 * i + 1] = r.delta[3 * i + 1];
    full[4 * i + 3] = r.delta[3 * i + 2];
  }
  EXPECT_LE((b * full - dnu).norm(), 1e-3 * dnu.norm());
}

TEST(InnerAllocation, SaturatesTiltAtLimit) {
  WlsSolver solver;
  const ActuatorState s = hover_actuators(hexa());
  Vec6 dnu;
  dnu << 0.0, 30.0, 0.0, 0.0, 0.0, 0.0;
  const auto r = inner_allocation_step(dnu, s, hexa(), InnerAllocationWeights{}, solver);
  const double limit = 40.0 * std::numbers::pi / 180.0;
  bool pinned = false;
  for (const auto& m : r.command.motors) pinned = pinned || std::abs(std::abs(m.alpha) - limit) < 1e-9;
  EXPECT_TRUE(pinned);
  EXPECT_TRUE(within_limits(r.command, hexa()));
}

TEST(InnerAllocation, CommandsRespectLimits) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g;
  WlsSolver solver;
  for (int k = 0; k < 200; ++k) {
    const ActuatorState s = oracles::random_actuator_state(hexa(), rng);
    Vec6 dnu;
    for (int i = 0; i < 6; ++i) dnu[i] = g(rng) * (i < 3 ? 10.0 : 0.5);
    const auto r = inner_allocation_step(dnu, s, hexa(), InnerAllocationWeights{}, solver);
    ASSERT_NE(r.solution.status, WlsStatus::kInfeasible);
    EXPECT_TRUE(within_limits(r.command, hexa()));
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(r.command.motors[i].gamma, s.motors[i].gamma);
  }
}

TEST(InnerAllocation, StepBoundsHold) {
  InnerAllocationWeights w;
  w.max_tilt_step = 0.01;
  w.max_omega_step = 5.0;
  WlsSolver solver;
  const ActuatorState s = hover_actuators(hexa());
  Vec6 dnu;
  dnu << 5.0, 5.0, -5.0, 0.1, 0.1, 0.1;
  const auto r = inner_allocation_step(dnu, s, hexa(), w, solver);
  for (int i = 0; i < 6; ++i) {
    EXPECT_LE(std::abs(r.delta[3 * i]), 0.01 + 1e-12);
    EXPECT_LE(std::abs(r.delta[3 * i + 1]), 0.01 + 1e-12);
    EXPECT_LE(std::abs(r.delta[3 * i + 2]), 5.0 + 1e-12);
  }
}

TEST(InnerAllocation, Deterministic) {
  std::mt19937_64 rng(15);
  WlsSolver a, b;
  Vec6 dnu;
  dnu << 1, -2, 0.5, 0.01, 0.02, -0.01;
  for (int k = 0; k < 20; ++k) {
    const ActuatorState s = oracles::random_actuator_state(hexa(), rng);
    const auto ra = inner_allocation_step(dnu, s, hexa(), InnerAllocationWeights{}, a);
    const auto rb = inner_allocation_step(dnu, s, hexa(), InnerAllocationWeights{}, b);
    for (Eigen::Index i = 0; i < ra.delta.size(); ++i) EXPECT_EQ(ra.delta[i], rb.delta[i]);
  }
}
