#include <benchmark/benchmark.h>

#include "lyapguard/fof.hpp"
#include "lyapguard/monitor.hpp"
#include "lyapguard/simulator.hpp"

namespace lyapguard {
namespace {

Gains bench_gains() {
  Gains g;
  g.k_eta = Vec3::Constant(0.25);
  g.k_r = Vec3::Constant(1.0);
  return g;
}

Reference tilted_reference() {
  AxisReference roll;
  roll.kind = AxisReference::Kind::Sinusoid;
  roll.amplitude = 0.2;
  roll.frequency = 1.0;
  AxisReference pitch;
  pitch.offset = -0.1;
  AxisReference yaw;
  yaw.offset = 0.3;
  return Reference({roll, pitch, yaw});
}

Simulator make_sim(double duration) {
  Scenario sc;
  sc.duration = duration;
  sc.reference = tilted_reference();
  sc.mismatch = 0.1;
  const RobustBounds b;
  return Simulator(PlantParams{}, bench_gains(), b, VBoundTemplate::matched(b, bench_gains()), sc);
}

void ControllerCompute(benchmark::State& state) {
  const RobustBounds b;
  const RobustController ctl(bench_gains(), b, VBoundTemplate::matched(b, bench_gains()),
                             ModelEstimates::scaled(PlantParams{}, 0.1));
  const EulerState x(Vec3(0.05, -0.02, 0.1), Vec3(0.1, 0.0, -0.05));
  const ReferenceSample ref = tilted_reference().at(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(ctl.compute(x, ref));
}
BENCHMARK(ControllerCompute);

void SimulatorStep(benchmark::State& state) {
  const Simulator sim = make_sim(1.0);
  const EulerState x(Vec3(0.05, -0.02, 0.1), Vec3(0.1, 0.0, -0.05));
  for (auto _ : state) benchmark::DoNotOptimize(sim.step(x, 0.3));
}
BENCHMARK(SimulatorStep);

void SimulateSeconds(benchmark::State& state) {
  const Simulator sim = make_sim(static_cast<double>(state.range(0)));
  std::size_t rows = 0;
  for (auto _ : state) {
    sim.run([&](const LogSample& s) { benchmark::DoNotOptimize(s.V); ++rows; });
  }
  state.SetItemsProcessed(static_cast<int64_t>(rows));
}
BENCHMARK(SimulateSeconds)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void MonitorFeed(benchmark::State& state) {
  const Simulator sim = make_sim(1.0);
  std::vector<MonitorSample> samples;
  sim.run([&](const LogSample& s) {
    samples.push_back(to_monitor_sample(s, sim.scenario().reference));
  });
  for (auto _ : state) {
    Monitor monitor(sim.assumption_config());
    for (const auto& s : samples) benchmark::DoNotOptimize(monitor.feed(s));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(samples.size()));
}
BENCHMARK(MonitorFeed)->Unit(benchmark::kMillisecond);

FofConjecture bench_conjecture(Branch branch) {
  const RobustBounds b;
  const LyapunovCert cert(bench_gains());
  Vec6 E;
  E << 0.01, -0.02, 0.015, 0.003, 0.0, -0.004;
  return emit_conjecture(b, VBoundTemplate::matched(b, bench_gains()), E,
                         vdot_polynomial(cert, PlantParams{}), default_conjecture_name(branch),
                         branch);
}

void FofEmit(benchmark::State& state) {
  const RobustBounds b;
  const LyapunovCert cert(bench_gains());
  Vec6 E = Vec6::Constant(0.01);
  for (auto _ : state) {
    const VdotPolynomial vdot = vdot_polynomial(cert, PlantParams{});
    benchmark::DoNotOptimize(emit_conjecture(b, VBoundTemplate::matched(b, bench_gains()), E,
                                             vdot, "bench", Branch::Outside));
  }
}
BENCHMARK(FofEmit)->Unit(benchmark::kMicrosecond);

void FofRender(benchmark::State& state) {
  const FofConjecture conj = bench_conjecture(Branch::Outside);
  for (auto _ : state) benchmark::DoNotOptimize(render(conj));
}
BENCHMARK(FofRender)->Unit(benchmark::kMicrosecond);

void FofParse(benchmark::State& state) {
  const std::string text = render(bench_conjecture(Branch::Outside));
  for (auto _ : state) benchmark::DoNotOptimize(parse(text));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(FofParse)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace lyapguard

BENCHMARK_MAIN();
