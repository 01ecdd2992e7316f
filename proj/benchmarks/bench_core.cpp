#include <benchmark/benchmark.h>

#include "cytonet/calibrate.hpp"
#include "cytonet/dynamics.hpp"
#include "cytonet/equilibria.hpp"
#include "cytonet/loops.hpp"
#include "cytonet/scenarios.hpp"

using namespace cytonet;

namespace {

const ScenarioContext& context() {
  static const ScenarioContext ctx = ScenarioContext::prepare(reference_spec());
  return ctx;
}

void BM_Rhs(benchmark::State& state) {
  const auto& ctx = context();
  const Eigen::VectorXd x = ctx.steady.th1.state.x;
  Eigen::VectorXd out;
  for (auto _ : state) {
    rhs_into(ctx.spec, x, nullptr, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Rhs);

void BM_HeunStep(benchmark::State& state) {
  const auto& ctx = context();
  State s = ctx.steady.th1.state;
  for (auto _ : state) {
    s = step(ctx.spec, s, 1e-3);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_HeunStep);

void BM_SimulateWithEvents(benchmark::State& state) {
  const auto& ctx = context();
  StepControl c;
  c.dt = 1e-3;
  c.t_end = static_cast<double>(state.range(0));
  c.record_every = 100;
  const EventSchedule events({{EventKind::Bolus, index(Species::Antigen), 1.0, 0.0, 30.0},
                              {EventKind::Infusion, index(Species::CytB), 1.0, 5.0, 2.0}});
  for (auto _ : state) {
    auto tr = simulate(ctx.spec, State{ctx.steady.th1.state.x, 0.0}, c, events);
    benchmark::DoNotOptimize(tr.states.back().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.t_end / c.dt));
}
BENCHMARK(BM_SimulateWithEvents)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_BuiltinScenario(benchmark::State& state) {
  const auto& ctx = context();
  const auto sc = builtin_scenarios()[static_cast<std::size_t>(state.range(0))];
  state.SetLabel(sc.name);
  for (auto _ : state) {
    auto r = run_scenario(ctx, sc);
    benchmark::DoNotOptimize(r.passed);
  }
}
BENCHMARK(BM_BuiltinScenario)->DenseRange(0, 9)->Unit(benchmark::kMillisecond);

void BM_Certificate(benchmark::State& state) {
  for (auto _ : state) {
    auto cert = bistability_certificate(reference_spec());
    benchmark::DoNotOptimize(cert.th1.residual);
  }
}
BENCHMARK(BM_Certificate)->Unit(benchmark::kMillisecond);

void BM_Jacobian(benchmark::State& state) {
  const auto& ctx = context();
  for (auto _ : state) {
    auto j = jacobian(ctx.spec, ctx.steady.th1.state.x);
    benchmark::DoNotOptimize(j.data());
  }
}
BENCHMARK(BM_Jacobian);

void BM_EnumerateCycles(benchmark::State& state) {
  const auto g = signed_adjacency(reference_spec());
  for (auto _ : state) {
    auto cycles = enumerate_cycles(g, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(cycles.size());
  }
}
BENCHMARK(BM_EnumerateCycles)->Arg(4)->Arg(9);

}  // namespace

BENCHMARK_MAIN();
