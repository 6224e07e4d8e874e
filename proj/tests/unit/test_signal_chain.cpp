#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "oactl/config.hpp"
#include "oactl/model.hpp"
#include "oactl/signal_chain.hpp"

using namespace oactl;

namespace {

const MultirotorConfig& hexa() {
  static const MultirotorConfig c = default_config().vehicle;
  return c;
}

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

}  // namespace

TEST(LowPassFilter, ConstantFromSteadyState) {
  LowPassFilter f(FilterParams{}, 2);
  f.reset(Eigen::Vector2d(3.5, -1.0));
  for (int k = 0; k < 100; ++k) EXPECT_LE((f.step(Eigen::Vector2d(3.5, -1.0)) - Eigen::Vector2d(3.5, -1.0)).norm(), 1e-12);
}

TEST(LowPassFilter, ZeroInZeroOut) {
  LowPassFilter f(FilterParams{}, 1);
  f.reset(scalar(0.0));
  for (int k = 0; k < 100; ++k) EXPECT_EQ(f.step(scalar(0.0))[0], 0.0);
}

TEST(LowPassFilter, StepOvershoot) {
  const FilterParams p;
  LowPassFilter f(p, 1);
  f.reset(scalar(0.0));
  double peak = 0.0, last = 0.0;
  for (int k = 0; k < 1000; ++k) {
    last = f.step(scalar(1.0))[0];
    peak = std::max(peak, last);
  }
  const double z = p.damping;
  const double expected = std::exp(-std::numbers::pi * z / std::sqrt(1.0 - z * z));
  EXPECT_NEAR(expected, 0.126, 1e-3);
  EXPECT_NEAR(peak - 1.0, expected, 0.01);
  EXPECT_NEAR(last, 1.0, 1e-9);
}

TEST(LowPassFilter, Linear) {
  LowPassFilter fu(FilterParams{}, 1), fw(FilterParams{}, 1), fs(FilterParams{}, 1);
  fu.reset(scalar(0.0));
  fw.reset(scalar(0.0));
  fs.reset(scalar(0.0));
  const double a = 2.5, b = -0.7;
  for (int k = 0; k < 500; ++k) {
    const double u = std::sin(0.01 * k) + (k > 100 ? 1.0 : 0.0), w = std::cos(0.037 * k * k);
    const double yu = fu.step(scalar(u))[0], yw = fw.step(scalar(w))[0];
    EXPECT_NEAR(fs.step(scalar(a * u + b * w))[0], a * yu + b * yw, 1e-12);
  }
}

TEST(LowPassFilter, ChannelsShareDelay) {
  LowPassFilter f(FilterParams{}, 3);
  f.reset(Eigen::Vector3d::Zero());
  for (int k = 0; k < 500; ++k) {
    const double s = std::sin(2.0 * 0.002 * k);
    const Eigen::VectorXd y = f.step(Eigen::Vector3d(s, 2.0 * s, -s));
    EXPECT_NEAR(y[1], 2.0 * y[0], 1e-12);
    EXPECT_NEAR(y[2], -y[0], 1e-12);
  }
}

TEST(FilterParams, Validation) {
  FilterParams p;
  p.damping = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = FilterParams{};
  p.natural_frequency = 600.0;  // wn * dt >= 1
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_NO_THROW(FilterParams{}.validate());
}

TEST(FilteredDerivative, RampSlope) {
  FilteredDerivative d(FilterParams{}, 1);
  d.reset(scalar(0.0));
  const double slope = 3.0, dt = 0.002;
  for (int k = 1; k <= 250; ++k) d.step(scalar(slope * dt * k));  // 0.5 s
  EXPECT_NEAR(d.derivative()[0], slope, 0.01 * slope);
}

TEST(FilteredDerivative, ConstantSettlesToZero) {
  FilteredDerivative d(FilterParams{}, 1);
  d.reset(scalar(0.0));
  for (int k = 0; k < 500; ++k) d.step(scalar(2.0));
  EXPECT_NEAR(d.derivative()[0], 0.0, 1e-9);
}

TEST(FilteredDerivative, SlowSineAmplitude) {
  FilteredDerivative d(FilterParams{}, 1);
  d.reset(scalar(0.0));
  const double w = 2.0, dt = 0.002;
  double peak = 0.0;
  for (int k = 1; k <= 10000; ++k) {
    d.step(scalar(std::sin(w * dt * k)));
    if (k > 2500) peak = std::max(peak, std::abs(d.derivative()[0]));
  }
  EXPECT_NEAR(peak, w, 0.05 * w);
}

TEST(ActuatorLag, FirstStep) {
  const double x = actuator_lag_step(0.0, 1.0, 0.002, 1.0 / 53.94, -10.0, 10.0);
  EXPECT_NEAR(x, 1.0 - std::exp(-0.002 * 53.94), 1e-15);
  EXPECT_NEAR(x, 0.1023, 1e-4);
}

TEST(ActuatorLag, HoldsAtCommand) {
  EXPECT_EQ(actuator_lag_step(0.4, 0.4, 0.002, 1.0 / 53.94, -1.0, 1.0), 0.4);
}

TEST(ActuatorLag, ConvergesToClippedLimit) {
  double x = 0.0;
  for (int k = 0; k < 2000; ++k) {
    x = actuator_lag_step(x, 5.0, 0.002, 1.0 / 53.94, -1.0, 1.0);
    ASSERT_LE(x, 1.0);
  }
  EXPECT_NEAR(x, 1.0, 1e-12);
}

TEST(ActuatorLag, Contraction) {
  for (double dt : {1e-5, 0.002, 0.1, 3.0}) {
    for (double x : {-2.0, 0.0, 0.3}) {
      const double cmd = 0.7;
      EXPECT_LT(std::abs(actuator_lag_step(x, cmd, dt, 1.0 / 53.94, -10.0, 10.0) - cmd), std::abs(x - cmd));
    }
  }
}

TEST(ActuatorLag, AppliesToEveryChannel) {
  const ActuatorState s = hover_actuators(hexa());
  ActuatorState cmd = s;
  for (auto& m : cmd.motors) {
    m.alpha = 0.3;
    m.beta = -0.2;
    m.omega += 10.0;
  }
  const double k = 1.0 - std::exp(-0.002 * 53.94);
  const ActuatorState out = actuator_lag_step(s, cmd, 0.002, ActuatorParams{}, hexa());
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(out.motors[i].alpha, k * 0.3, 1e-14);
    EXPECT_NEAR(out.motors[i].beta, k * -0.2, 1e-14);
    EXPECT_NEAR(out.motors[i].omega, s.motors[i].omega + k * 10.0, 1e-10);
    EXPECT_EQ(out.motors[i].gamma, s.motors[i].gamma);
  }
}

TEST(WrenchEstimate, Hover) {
  const Wrench w = estimate_body_wrench(hover_actuators(hexa()), hexa());
  EXPECT_LE((w.force - Vec3(0, 0, -6.5295)).norm(), 1e-4);
  EXPECT_LE(w.torque.norm(), 1e-12);
}

TEST(WrenchEstimate, ZeroSpeedsGiveZero) {
  ActuatorState s = hover_actuators(hexa());
  for (auto& m : s.motors) {
    m.omega = 0.0;
    m.alpha = 0.1;
  }
  const Wrench w = estimate_body_wrench(s, hexa());
  EXPECT_TRUE(w.force.isZero(0.0));
  EXPECT_TRUE(w.torque.isZero(0.0));
}

TEST(WrenchEstimate, EqualsPlantWrenchAtSteadyState) {
  ActuatorState s = hover_actuators(hexa());
  s.motors[2].alpha = 0.2;
  s.motors[4].beta = -0.1;
  ActuatorState lagged = s;
  for (int k = 0; k < 3000; ++k) lagged = actuator_lag_step(lagged, s, 0.002, ActuatorParams{}, hexa());
  const Wrench a = estimate_body_wrench(lagged, hexa()), b = total_wrench(hexa(), s);
  EXPECT_LE((a.force - b.force).norm(), 1e-12);
  EXPECT_LE((a.torque - b.torque).norm(), 1e-12);
}
