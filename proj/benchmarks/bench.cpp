#include <benchmark/benchmark.h>

#include "oactl/config.hpp"
#include "oactl/controller.hpp"
#include "oactl/force_sets.hpp"
#include "oactl/guidance.hpp"
#include "oactl/model.hpp"
#include "oactl/sim.hpp"
#include "oactl/stabilization.hpp"

using namespace oactl;

namespace {

const SystemConfig& sys() {
  static const SystemConfig c = default_config();
  return c;
}

std::shared_ptr<const ZeroTorqueSet> s0() {
  static const auto s = build_zero_torque_set(sys().vehicle, sys().controller);
  return s;
}

}  // namespace

// Lateral demand beyond the slice so the QP has active rows.
static void BM_GuidanceQp(benchmark::State& state) {
  const double m = sys().vehicle.mass;
  const Vec3 f_m(0, 0, -m * 9.81);
  Vec6 u;
  u << f_m, Vec3::Zero();
  const Vec3 d(state.range(0), 0.0, 0.0);
  const auto cons = build_constraints(*s0(), reference_body_force(m, d, Mat3::Identity(), f_m), f_m, Vec3::Zero(),
                                      AttitudeLimits{});
  WlsSolver solver;
  for (auto _ : state) {
    auto r = guidance_allocation_step(m, d, u, Vec3(0.1, -0.1, 0.0), sys().controller.guidance_weights, cons, solver);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_GuidanceQp)->Arg(0)->Arg(20)->Unit(benchmark::kMicrosecond);

static void BM_InnerAllocation(benchmark::State& state) {
  const ActuatorState s = hover_actuators(sys().vehicle);
  Vec6 dnu;
  dnu << 0.5, -0.3, -1.0, 0.01, -0.02, 0.005;
  WlsSolver solver;
  for (auto _ : state) {
    auto r = inner_allocation_step(dnu, s, sys().vehicle, sys().controller.inner_weights, solver);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_InnerAllocation)->Unit(benchmark::kMicrosecond);

static void BM_ControlStep(benchmark::State& state) {
  Simulation sim(sys().vehicle, sys().controller, scenario_full_pose(), SimOptions{}, s0());
  for (auto _ : state) {
    sim.step();
    if (sim.done()) {
      state.PauseTiming();
      sim = Simulation(sys().vehicle, sys().controller, scenario_full_pose(), SimOptions{}, s0());
      state.ResumeTiming();
    }
  }
}
BENCHMARK(BM_ControlStep)->Unit(benchmark::kMicrosecond);

static void BM_BuildZeroTorqueSet(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_zero_torque_set(sys().vehicle, sys().controller));
}
BENCHMARK(BM_BuildZeroTorqueSet)->Unit(benchmark::kMillisecond);

static void BM_PlaneSlice(benchmark::State& state) {
  const double z = -sys().vehicle.mass * 9.81;
  for (auto _ : state) benchmark::DoNotOptimize(plane_slice(s0()->polytope, z));
}
BENCHMARK(BM_PlaneSlice)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
