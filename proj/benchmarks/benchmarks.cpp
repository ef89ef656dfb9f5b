#include <benchmark/benchmark.h>

#include "brachiation/cable.hpp"
#include "brachiation/dynamics.hpp"
#include "brachiation/simulation.hpp"

namespace brachiation {
namespace {

RobotState swing_state() {
  RobotState s;
  s.q = Vec3(deg(-35.0), deg(-110.0), 1.84);
  s.qdot = Vec3(1.0, -2.0, 0.1);
  return s;
}

void BM_ManipulatorMatrices(benchmark::State& state) {
  const RobotModel model;
  const RobotState s = swing_state();
  for (auto _ : state) benchmark::DoNotOptimize(model.manipulator_matrices(s));
}
BENCHMARK(BM_ManipulatorMatrices);

void BM_AffineTerms(benchmark::State& state) {
  const RobotModel model;
  const RobotState s = swing_state();
  for (auto _ : state) benchmark::DoNotOptimize(model.affine_terms(s));
}
BENCHMARK(BM_AffineTerms);

void BM_IntegrateStep(benchmark::State& state) {
  Scenario sc;
  sc.initial = swing_state();
  const RobotModel model(sc.robot);
  World world = initial_world(sc, model);
  StepInput in;
  in.adapting = true;
  for (auto _ : state) {
    integrate_step(sc, model, world, in, sc.dt);
    benchmark::DoNotOptimize(world.robot);
  }
}
BENCHMARK(BM_IntegrateStep);

void BM_AdvanceCable(benchmark::State& state) {
  CableParams p;
  p.n_segments = static_cast<int>(state.range(0));
  const CableState rest =
      static_equilibrium(p, NodeLoad{static_cast<std::size_t>(p.n_segments / 4), 39.24});
  CableState cable = rest;
  const double z = cable.pos[*cable.attach_index].y();
  for (auto _ : state) {
    advance_cable(cable, p, 1e-4, z, z);
    benchmark::DoNotOptimize(cable.pos.data());
  }
}
BENCHMARK(BM_AdvanceCable)->Arg(16)->Arg(32)->Arg(64);

void BM_RunSwing(benchmark::State& state) {
  Scenario sc;
  sc.plant = state.range(0) == 0 ? PlantKind::kSpringDamper : PlantKind::kFullCable;
  sc.initial.q = Vec3(deg(-35.0), deg(-110.0), 1.84);
  for (auto _ : state) benchmark::DoNotOptimize(run_swing(sc).metrics);
}
BENCHMARK(BM_RunSwing)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace brachiation

BENCHMARK_MAIN();
