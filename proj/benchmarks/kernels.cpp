#include <numbers>

#include <benchmark/benchmark.h>

#include "qcawalk/circuit.hpp"
#include "qcawalk/gates.hpp"
#include "qcawalk/lattice.hpp"
#include "qcawalk/noise.hpp"
#include "qcawalk/walks.hpp"

using namespace qcaw;

static void BM_XyGate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  StateVector psi = search_initializer(Lattice::cycle(n), InitializerMode::exact);
  const Matrix4 u = xy_gate(std::numbers::pi / 4);
  for (auto _ : state) {
    apply_two_qubit(psi, u, 3, n - 2);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(psi.size()));
}
BENCHMARK(BM_XyGate)->Arg(12)->Arg(16)->Arg(20);

static void BM_CycleSearchStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Lattice lat = Lattice::cycle(n);
  const StepOperator step = build_step_operator(lat, AngleSchedule::search(2), Variant::search);
  StateVector psi = search_initializer(lat, InitializerMode::exact);
  for (auto _ : state) {
    apply_step(psi, step);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_CycleSearchStep)->Arg(8)->Arg(16);

static void BM_TorusSearchStep(benchmark::State& state) {
  const Lattice lat = Lattice::torus(4);
  const StepOperator step = build_step_operator(lat, AngleSchedule::search(3), Variant::search);
  StateVector psi = search_initializer(lat, InitializerMode::exact);
  for (auto _ : state) {
    apply_step(psi, step);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_TorusSearchStep);

static NoiseModel bench_noise() {
  NoiseModel m;
  m.relaxation_rate = 1.2e4;
  m.dephasing_rate = 1.2e4;
  return m;
}

static void BM_DensityWalkStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Lattice lat = Lattice::cycle(n);
  const StepOperator step = build_step_operator(lat, AngleSchedule::walk(), Variant::walk);
  DensityMatrix rho = DensityMatrix::from_state(qw_init(lat, n / 2 - 1, true));
  DensityEvolver ev(bench_noise());
  for (auto _ : state) {
    ev.apply_circuit(rho, step.layers);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_DensityWalkStep)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_TrajectoryWalk(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Lattice lat = Lattice::cycle(n);
  const StepOperator step = build_step_operator(lat, AngleSchedule::walk(), Variant::walk);
  const StateVector init = qw_init(lat, n / 2 - 1, true);
  TrajectoryRequest req;
  req.steps = 10;
  req.n_traj = 16;
  for (auto _ : state) {
    auto r = trajectory_run(init, {}, step, bench_noise(), req);
    benchmark::DoNotOptimize(r.total_jumps);
  }
  state.counters["traj_steps/s"] = benchmark::Counter(
      static_cast<double>(state.iterations() * req.n_traj * req.steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_TrajectoryWalk)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_NoisyGateChannel(benchmark::State& state) {
  const GateSpec g = make_xy(0, 1, std::numbers::pi / 4);
  const NoiseModel m = bench_noise();
  for (auto _ : state) benchmark::DoNotOptimize(noisy_gate_channel(g, m));
}
BENCHMARK(BM_NoisyGateChannel);

BENCHMARK_MAIN();
